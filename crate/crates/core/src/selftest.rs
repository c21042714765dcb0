//! The bundled self-test suite: `d^2 = 0` sweeps (including the
//! demonstration that the rejected differential convention fails),
//! rewriting-confluence sweeps, the golden identities from the worked
//! calculations, and brute-force linear-algebra oracles.

use std::time::Instant;

use crate::cohomology::{
    bockstein_d1, class_vector, cohomology, critical_group, critical_window,
};
use crate::complex::{
    assemble, bp_preset_for_window, check_d_squared, d_squared_words, differential,
    DiffConvention, Window,
};
use crate::dyer_lashof::{
    adem_reduce_q, normalize_q_word, q_apply, verify_big_relation, QPolynomial,
};
use crate::gf2::{kernel_basis, rref_and_rank, solve_in_span, Gf2Matrix, Gf2Vector};
use crate::ops::{
    apply_r, filter_unstable_words, normalize_r_word, render_element, render_monomial, Element,
    Monomial, RewriteStrategy,
};
use crate::presentation::bp_preset;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn run(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Check {
    let start = Instant::now();
    let (passed, detail) = f();
    Check {
        name,
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

/// The full suite, in a fixed order.
pub fn run_selftest() -> Vec<Check> {
    vec![
        run("d2-sweep", d2_sweep),
        run("d2-rejected-convention", d2_rejected_convention),
        run("confluence-R", confluence_r),
        run("confluence-Q", confluence_q),
        run("confluence-v-commutation", confluence_v),
        run("golden-adem-identities", golden_adem_identities),
        run("golden-bp-differentials", golden_bp_differentials),
        run("golden-level-minus-one", golden_level_minus_one),
        run("golden-level-zero", golden_level_zero),
        run("golden-level-one", golden_level_one),
        run("golden-level-two", golden_level_two),
        run("golden-critical-group", golden_critical_group),
        run("golden-bockstein-d1", golden_bockstein_d1),
        run("golden-big-relation", golden_big_relation),
        run("gf2-oracles", gf2_oracles),
    ]
}

pub fn sweep_window(n: i32) -> Window {
    Window::new(-64, 0, 8, n)
}

/// `d^2 = 0` for BP at n in {-1, ..., 4} over x in [-64, 0], s <= 8.
///
/// The full window is swept once per distinct word part (`d` commutes
/// with v-multiplication verbatim, so this covers every basis monomial);
/// the assembled matrix path is then composed on a narrower region as an
/// independent cross-check.
pub fn d2_sweep() -> (bool, String) {
    let mut words = 0usize;
    for n in -1..=4 {
        let w = sweep_window(n);
        let module = bp_preset_for_window(&w);
        let report = d_squared_words(&w, &module, DiffConvention::Standard);
        if !report.passed() {
            return (
                false,
                format!(
                    "n={n}: {} word parts with nonzero d^2, first {:?}",
                    report.failures.len(),
                    report.failures.first()
                ),
            );
        }
        words += report.monomials_checked;
    }
    let mut compositions = 0usize;
    for n in -1..=4 {
        let w = Window::new(-24, 0, 5, n);
        let module = bp_preset_for_window(&w);
        let slice = match assemble(&w, &module) {
            Ok(s) => s,
            Err(e) => return (false, format!("assembly failed at n={n}: {e}")),
        };
        let report = check_d_squared(&slice);
        if !report.passed() {
            return (
                false,
                format!(
                    "matrix path n={n}: {} failures, first {:?}",
                    report.failures.len(),
                    report.failures.first()
                ),
            );
        }
        compositions += report.monomials_checked;
    }
    (
        true,
        format!("{words} word parts + {compositions} matrix compositions, 0 failures"),
    )
}

/// The rejected exponent rule `v_k R^(a + 2^k - 1)` must break `d^2 = 0`
/// on the same sweep.
pub fn d2_rejected_convention() -> (bool, String) {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for n in -1..=4 {
        let w = sweep_window(n);
        let module = bp_preset_for_window(&w);
        let report = d_squared_words(&w, &module, DiffConvention::LowShift);
        failures += report.failures.len();
        checked += report.monomials_checked;
    }
    (
        failures > 0,
        format!("{failures} of {checked} word parts fail d^2 = 0 under the rejected rule"),
    )
}

/// Left-vs-right Adem rewriting on `R^a R^b R^c y1`, `4 <= c < b < a <= 64`.
/// Where every application step is legal (`b >= c + 2`, `a >= b + c + 2`
/// on the degree -2 generator), the production `apply_r` chain must agree
/// with word rewriting followed by the basis-level instability filter.
pub fn confluence_r() -> (bool, String) {
    let mut count = 0usize;
    let mut chain_count = 0usize;
    for c in 4..=62u32 {
        for b in (c + 1)..=63 {
            for a in (b + 1)..=64 {
                let left = normalize_r_word(&[a, b, c], RewriteStrategy::LeftmostFirst);
                let right = normalize_r_word(&[a, b, c], RewriteStrategy::RightmostFirst);
                if left != right {
                    return (false, format!("strategies differ on R{a} R{b} R{c}"));
                }
                count += 1;
                if b >= c + 2 && a >= b + c + 2 {
                    let filtered = filter_unstable_words(&left, 0, -2);
                    let chained = apply_r(
                        a,
                        &apply_r(b, &Element::single(Monomial::new(&[], &[c], 0, -2)), -1),
                        -1,
                    );
                    if filtered != chained {
                        return (
                            false,
                            format!("apply-chain differs from word rewriting on R{a} R{b} R{c} y1"),
                        );
                    }
                    chain_count += 1;
                }
            }
        }
    }
    (
        true,
        format!("{count} triples strategy-confluent, {chain_count} legal chains agree"),
    )
}

/// Left-vs-right Adem rewriting on `Q^r Q^s Q^t`, `r > 2s > 4t`, `r <= 64`.
pub fn confluence_q() -> (bool, String) {
    let mut count = 0usize;
    for t in 1..=15u32 {
        for s in (2 * t + 1)..=31 {
            for r in (2 * s + 1)..=64 {
                let left = normalize_q_word(&[r, s, t], RewriteStrategy::LeftmostFirst);
                let right = normalize_q_word(&[r, s, t], RewriteStrategy::RightmostFirst);
                if left != right {
                    return (false, format!("strategies differ on Q{r} Q{s} Q{t}"));
                }
                count += 1;
            }
        }
    }
    (true, format!("{count} triples confluent"))
}

/// `apply_R(a, v_i v_j y1)` is independent of which `v` commutes first.
pub fn confluence_v() -> (bool, String) {
    let mut count = 0usize;
    for n in 2..=3i32 {
        for i in 0..n as u32 {
            for j in (i + 1)..=(n as u32) {
                for a in 1..=64u32 {
                    let m = Monomial::generator(0, -2).times_v(i).times_v(j);
                    let production = apply_r(a, &Element::single(m.clone()), n);
                    // commute the larger index first instead
                    let mut alt = Element::zero();
                    if -(m.bidegree().x as i64) < a as i64 + 1 {
                        let inner = Monomial::generator(0, -2).times_v(i);
                        let mut k = j + 1;
                        while (k as i32) <= n {
                            let shifted =
                                (a as i64 - (1i64 << (j + 1)) + (1i64 << (k + 1))) as u32;
                            alt.add_assign(
                                &apply_r(shifted, &Element::single(inner.clone()), n).times_v(k),
                            );
                            k += 1;
                        }
                    }
                    if production != alt {
                        return (false, format!("orders differ on R{a} v{i} v{j} y1 at n={n}"));
                    }
                    count += 1;
                }
            }
        }
    }
    (true, format!("{count} cases order-independent"))
}

fn expect<T: PartialEq + std::fmt::Debug>(
    failures: &mut Vec<String>,
    what: &str,
    got: T,
    want: T,
) {
    if got != want {
        failures.push(format!("{what}: got {got:?}, want {want:?}"));
    }
}

fn summarize(failures: Vec<String>, ok: String) -> (bool, String) {
    if failures.is_empty() {
        (true, ok)
    } else {
        (false, failures.join("; "))
    }
}

/// `R^9 R^5 = 0`, `R^8 R^5 = R^9 R^4`, `R^16 R^8 R^5 = R^17 R^8 R^4`,
/// `Q^9 Q^4 = 0`, and `Q^22 Q^6` on a degree-2 class.
pub fn golden_adem_identities() -> (bool, String) {
    let mut failures = Vec::new();
    let y1 = |word: &[u32]| Element::single(Monomial::new(&[], word, 0, -2));
    expect(
        &mut failures,
        "R9 R5 y1",
        apply_r(9, &y1(&[5]), -1),
        Element::zero(),
    );
    expect(
        &mut failures,
        "R8 R5 y1",
        apply_r(8, &y1(&[5]), -1),
        y1(&[9, 4]),
    );
    expect(
        &mut failures,
        "R16 R8 R5 y1",
        apply_r(16, &apply_r(8, &y1(&[5]), -1), -1),
        y1(&[17, 8, 4]),
    );
    expect(
        &mut failures,
        "Q9 Q4",
        adem_reduce_q(9, 4).unwrap(),
        Vec::new(),
    );
    let x = QPolynomial::generator("x", 2);
    let lhs = q_apply(22, &q_apply(6, &x));
    let mut rhs = q_apply(17, &q_apply(11, &x));
    rhs.add_assign(&q_apply(15, &q_apply(13, &x)));
    expect(&mut failures, "Q22 Q6 x", lhs, rhs);
    summarize(failures, "5 identities hold".into())
}

pub fn golden_bp_differentials() -> (bool, String) {
    let module = bp_preset(4).unwrap();
    let mut failures = Vec::new();
    let d = |k: usize, n: i32| {
        let gen = Monomial::generator(k - 1, module.generators()[k - 1].degree);
        render_element(&differential(&gen, n, &module), &module)
    };
    expect(&mut failures, "d y1", d(1, -1), "0".into());
    expect(&mut failures, "d y2", d(2, -1), "R5 y1".into());
    expect(&mut failures, "d y3", d(3, -1), "R9 y2 + R13 y1".into());
    expect(&mut failures, "d y3 at n=2", d(3, 2), "R9 y2 + R13 y1".into());
    summarize(failures, "bp preset differentials match".into())
}

pub fn golden_level_minus_one() -> (bool, String) {
    let w = Window::new(-16, -2, 3, -1);
    let module = bp_preset_for_window(&w);
    let slice = assemble(&w, &module).unwrap();
    let report = cohomology(&slice).unwrap();
    let mut failures = Vec::new();
    expect(&mut failures, "dim(-7,1)", report.dimension(-7, 1), 0);
    expect(&mut failures, "dim(-9,1)", report.dimension(-9, 1), 1);
    expect(&mut failures, "dim(-14,2)", report.dimension(-14, 2), 1);
    expect(&mut failures, "dim(-15,2)", report.dimension(-15, 2), 0);
    expect(
        &mut failures,
        "class(-9,1)",
        report.class_label(-9, 1, 0, &module),
        "R7 y1".into(),
    );
    summarize(failures, "base-level spot checks match".into())
}

pub fn golden_level_zero() -> (bool, String) {
    let w = Window::new(-16, -2, 4, 0);
    let module = bp_preset_for_window(&w);
    let slice = assemble(&w, &module).unwrap();
    let report = cohomology(&slice).unwrap();
    let mut failures = Vec::new();
    for s in 0..=4u32 {
        expect(
            &mut failures,
            &format!("tower dim(-2,{s})"),
            report.dimension(-2, s),
            1,
        );
    }
    expect(
        &mut failures,
        "leading term at (-14,2)",
        report.class_label(-14, 2, 0, &module),
        "R8 R4 y1 (+3)".into(),
    );
    // v0 kills [R7 y1] and is injective on the tower
    let r7 = report.representatives(-9, 1)[0].clone();
    let v0r7 = class_vector(&r7.times_v(0), -9, 2, &report, &slice).unwrap();
    expect(&mut failures, "v0 [R7 y1]", v0r7.is_zero(), true);
    let y1 = report.representatives(-2, 0)[0].clone();
    let v0y1 = class_vector(&y1.times_v(0), -2, 1, &report, &slice).unwrap();
    expect(&mut failures, "v0 [y1] nonzero", v0y1.is_zero(), false);
    summarize(failures, "level-0 towers and torsion match".into())
}

pub fn golden_level_one() -> (bool, String) {
    let w = Window::new(-20, -2, 4, 1);
    let module = bp_preset_for_window(&w);
    let slice = assemble(&w, &module).unwrap();
    let report = cohomology(&slice).unwrap();
    let mut failures = Vec::new();
    let r7 = report.representatives(-9, 1)[0].clone();
    let r9 = report.representatives(-11, 1)[0].clone();
    let v0r7 = class_vector(&r7.times_v(0), -9, 2, &report, &slice).unwrap();
    let v1r9 = class_vector(&r9.times_v(1), -9, 2, &report, &slice).unwrap();
    expect(&mut failures, "v0 [R7 y1] nonzero", v0r7.is_zero(), false);
    expect(&mut failures, "v0 [R7 y1] = v1 [R9 y1]", v0r7 == v1r9, true);
    let v1r7 = class_vector(&r7.times_v(1), -7, 2, &report, &slice).unwrap();
    expect(&mut failures, "v1 [R7 y1]", v1r7.is_zero(), true);
    summarize(failures, "first sawtooth identities hold".into())
}

pub fn golden_level_two() -> (bool, String) {
    let w = Window::new(-32, -2, 4, 2);
    let module = bp_preset_for_window(&w);
    let slice = assemble(&w, &module).unwrap();
    let report = cohomology(&slice).unwrap();
    let mut failures = Vec::new();
    let find = |x: i32, s: u32, label: &str| -> Option<Element> {
        (0..report.dimension(x, s))
            .find(|&i| {
                report
                    .representatives(x, s)[i]
                    .leading_term()
                    .map(|m| render_monomial(m, &module) == label)
                    .unwrap_or(false)
            })
            .map(|i| report.representatives(x, s)[i].clone())
    };
    let Some(g157) = find(-24, 2, "R15 R7 y1") else {
        return (false, "no class R15 R7 y1 at (-24, 2)".into());
    };
    let Some(g199) = find(-30, 2, "R19 R9 y1") else {
        return (false, "no class R19 R9 y1 at (-30, 2)".into());
    };
    let v0 = class_vector(&g157.times_v(0), -24, 3, &report, &slice).unwrap();
    let v2 = class_vector(&g199.times_v(2), -24, 3, &report, &slice).unwrap();
    expect(&mut failures, "v0 [R15 R7 y1] nonzero", v0.is_zero(), false);
    expect(&mut failures, "v0 [R15 R7] = v2 [R19 R9]", v0 == v2, true);
    summarize(failures, "hidden v2-extension holds".into())
}

pub fn golden_critical_group() -> (bool, String) {
    let mut failures = Vec::new();
    for (n, want) in [
        (3, vec!["v0^3 y1"]),
        (4, vec!["v4 R21 R9 y1", "v4 R23 R7 y1", "v0^3 y1"]),
    ] {
        let module = bp_preset_for_window(&critical_window(n));
        let classes = critical_group(n, &module).unwrap();
        let labels: Vec<String> = classes
            .iter()
            .map(|c| render_monomial(&c.leading, &module))
            .collect();
        expect(
            &mut failures,
            &format!("critical n={n}"),
            labels,
            want.iter().map(|s| s.to_string()).collect(),
        );
    }
    summarize(failures, "critical groups at n=3,4 match".into())
}

pub fn golden_bockstein_d1() -> (bool, String) {
    let module = bp_preset(5).unwrap();
    let mut failures = Vec::new();
    let entries = bockstein_d1(0, &Window::new(-20, -2, 4, 0), &module).unwrap();
    let by_source = |label: &str| -> Vec<String> {
        entries
            .iter()
            .filter(|e| e.source_label == label)
            .map(|e| e.target_label.clone())
            .collect()
    };
    expect(&mut failures, "d1(R6 y1)", by_source("R6 y1"), vec!["R7 y1".into()]);
    expect(&mut failures, "d1(R4 y1)", by_source("R4 y1"), Vec::new());
    let entries = bockstein_d1(1, &Window::new(-26, -2, 4, 1), &module).unwrap();
    let hit: Vec<String> = entries
        .iter()
        .filter(|e| e.source_label == "R13 R6 y1")
        .map(|e| e.target_label.clone())
        .collect();
    expect(&mut failures, "d1(R13 R6 y1)", hit, vec!["R15 R7 y1".into()]);
    summarize(failures, "first Bockstein differentials match".into())
}

pub fn golden_big_relation() -> (bool, String) {
    match verify_big_relation() {
        Ok(residual) if residual.is_zero() => (true, "residual = 0".into()),
        Ok(residual) => (false, format!("nonzero residual with {} terms", residual.len())),
        Err(e) => (false, format!("{e}")),
    }
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
}

/// Random-matrix oracles: rank by row-space enumeration, kernels by
/// exhaustive null-space search, span membership by exhaustive
/// combination, all on sizes small enough to enumerate.
pub fn gf2_oracles() -> (bool, String) {
    let mut rng = XorShift(0x9E3779B97F4A7C15);
    let mut cases = 0usize;
    for trial in 0..24 {
        let rows = 3 + (rng.next() % 10) as usize; // <= 12
        let cols = 3 + (rng.next() % 12) as usize; // <= 14
        let mut m = Gf2Matrix::zeros(rows, cols);
        let mut row_masks = vec![0u32; rows];
        for r in 0..rows {
            for c in 0..cols {
                if rng.next() % 2 == 0 {
                    m.set(r, c, true);
                    row_masks[r] |= 1 << c;
                }
            }
        }
        // rank oracle: cardinality of the row space
        let mut space = std::collections::HashSet::new();
        for combo in 0u32..(1 << rows) {
            let mut acc = 0u32;
            for (r, &mask) in row_masks.iter().enumerate() {
                if (combo >> r) & 1 == 1 {
                    acc ^= mask;
                }
            }
            space.insert(acc);
        }
        let (_, rank, _) = rref_and_rank(&m);
        if 1usize << rank != space.len() {
            return (false, format!("trial {trial}: rank {rank} vs |row space| {}", space.len()));
        }
        // kernel oracle: exhaustive null-space enumeration
        let basis = kernel_basis(&m);
        if basis.len() != cols - rank {
            return (false, format!("trial {trial}: kernel count {}", basis.len()));
        }
        let mut null_count = 0usize;
        for v_mask in 0u32..(1 << cols) {
            let in_kernel = row_masks
                .iter()
                .all(|&rm| ((rm & v_mask).count_ones()) % 2 == 0);
            if in_kernel {
                null_count += 1;
                let v = mask_to_vector(v_mask, cols);
                if solve_in_span(&basis, &v).unwrap().is_none() {
                    return (false, format!("trial {trial}: kernel vector outside basis span"));
                }
            }
        }
        if null_count != 1usize << (cols - rank) {
            return (false, format!("trial {trial}: null count {null_count}"));
        }
        for b in &basis {
            if !m.mul_vector(b).unwrap().is_zero() {
                return (false, format!("trial {trial}: basis vector not in kernel"));
            }
        }
        // span oracle
        let k = 1 + (rng.next() % 8) as usize;
        let len = 4 + (rng.next() % 9) as usize; // <= 12
        let span_basis: Vec<Gf2Vector> = (0..k)
            .map(|_| mask_to_vector((rng.next() as u32) & ((1 << len) - 1), len))
            .collect();
        for _ in 0..8 {
            let target = mask_to_vector((rng.next() as u32) & ((1 << len) - 1), len);
            let mut reachable = false;
            for combo in 0u32..(1 << k) {
                let mut acc = Gf2Vector::zeros(len);
                for (i, b) in span_basis.iter().enumerate() {
                    if (combo >> i) & 1 == 1 {
                        acc.xor_assign(b);
                    }
                }
                if acc == target {
                    reachable = true;
                    break;
                }
            }
            match solve_in_span(&span_basis, &target).unwrap() {
                Some(coeffs) => {
                    if !reachable {
                        return (false, format!("trial {trial}: false positive span"));
                    }
                    let mut acc = Gf2Vector::zeros(len);
                    for i in coeffs.support() {
                        acc.xor_assign(&span_basis[i]);
                    }
                    if acc != target {
                        return (false, format!("trial {trial}: bad recombination"));
                    }
                }
                None => {
                    if reachable {
                        return (false, format!("trial {trial}: false negative span"));
                    }
                }
            }
        }
        // rank(m) = rank(transpose m)
        let (_, rank_t, _) = rref_and_rank(&m.transpose());
        if rank != rank_t {
            return (false, format!("trial {trial}: rank {rank} != transpose rank {rank_t}"));
        }
        cases += 1;
    }
    (true, format!("{cases} random matrices agree with enumeration"))
}

fn mask_to_vector(mask: u32, len: usize) -> Gf2Vector {
    let mut v = Gf2Vector::zeros(len);
    for i in 0..len {
        if (mask >> i) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}
