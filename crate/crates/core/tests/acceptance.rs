//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measurement. Oracles are independent re-derivations living in
//! this file (word enumerations, constraint sets, closure spans), never
//! calls back into the code path under test.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use koszul_core::cohomology::{
    bockstein_d1, class_vector, cohomology, compute_v_actions, critical_group, critical_window,
    stability_check, CohomologyReport,
};
use koszul_core::complex::{
    assemble, bp_preset_for_window, differential, ComplexSlice, Window,
};
use koszul_core::dyer_lashof::{
    big_relation_residual_without, big_relation_terms, multiply, power, q_apply,
    render_qpolynomial, verify_big_relation, QPolynomial,
};
use koszul_core::gf2::{reduced_echelon, Gf2Vector};
use koszul_core::ops::{apply_r, render_monomial, Element, Monomial};
use koszul_core::presentation::ModulePresentation;
use koszul_core::selftest;

/// Timed criteria run one at a time so wall-clock bounds are meaningful.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion}: PASS — {detail}");
}

fn bp_cohomology(w: &Window) -> (ModulePresentation, ComplexSlice, CohomologyReport) {
    let module = bp_preset_for_window(w);
    let slice = assemble(w, &module).expect("assemble");
    let report = cohomology(&slice).expect("cohomology");
    (module, slice, report)
}

// --- oracle: admissible words on y1 and the excluded suffixes ------------

/// Forbidden suffixes: [5], [9, 4], [17, 8, 4], [33, 16, 8, 4], ...
fn forbidden_tails(max_len: usize) -> Vec<Vec<u32>> {
    let mut tails = Vec::new();
    for j in 1..=max_len as u32 {
        let mut t = vec![(1u32 << (j + 1)) + 1];
        for p in (2..=j).rev() {
            t.push(1 << p);
        }
        tails.push(t);
    }
    tails
}

fn ends_in_forbidden(word: &[u32], tails: &[Vec<u32>]) -> bool {
    tails
        .iter()
        .any(|t| word.len() >= t.len() && word[word.len() - t.len()..] == t[..])
}

/// All admissible words on y1 (entries halving, last >= 4) with the given
/// sum bound and length bound, by brute-force recursion.
fn admissible_words_on_y1(max_sum: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut stack: Vec<Vec<u32>> = (4..=max_sum).map(|a| vec![a]).collect();
    while let Some(w) = stack.pop() {
        let sum: u32 = w.iter().sum();
        out.push(w.clone());
        if w.len() == max_len {
            continue;
        }
        let mut a = 2 * w[0];
        while sum + a <= max_sum {
            let mut next = vec![a];
            next.extend_from_slice(&w);
            stack.push(next);
            a += 1;
        }
    }
    out.retain(|w| w.iter().sum::<u32>() <= max_sum);
    out
}

/// Tower words: [], [4], [8, 4], [16, 8, 4], ...
fn tower_words(max_sum: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut j = 2u32;
    loop {
        let w: Vec<u32> = (2..=j).rev().map(|p| 1 << p).collect();
        if w.iter().sum::<u32>() > max_sum {
            break;
        }
        out.push(w);
        j += 1;
    }
    out
}

#[test]
fn criterion_01_consistency_sweep() {
    let _guard = serial();
    let start = Instant::now();
    let (ok, detail) = selftest::d2_sweep();
    assert!(ok, "adopted convention sweep failed: {detail}");
    let (rejected_ok, rejected_detail) = selftest::d2_rejected_convention();
    assert!(
        rejected_ok,
        "rejected convention reported no failures: {rejected_detail}"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "sweep took {elapsed:?}, budget 60 s"
    );
    pass(
        1,
        &format!("{detail}; rejected rule: {rejected_detail}; {elapsed:?}"),
    );
}

#[test]
fn criterion_02_level_minus_one_basis() {
    let _guard = serial();
    let start = Instant::now();
    let w = Window::new(-40, -2, 5, -1);
    let (module, _slice, report) = bp_cohomology(&w);
    let tails = forbidden_tails(6);
    let mut oracle: std::collections::BTreeMap<(i32, u32), Vec<String>> = Default::default();
    for word in admissible_words_on_y1(38, 5) {
        if ends_in_forbidden(&word, &tails) {
            continue;
        }
        let x = -2 - word.iter().sum::<u32>() as i32;
        let s = word.len() as u32;
        if x < -40 {
            continue;
        }
        let m = Monomial::new(&[], &word, 0, -2);
        oracle.entry((x, s)).or_default().push(render_monomial(&m, &module));
    }
    for list in oracle.values_mut() {
        list.sort();
    }
    let mut computed: std::collections::BTreeMap<(i32, u32), Vec<String>> = Default::default();
    for (&(x, s), cell) in &report.cells {
        if cell.dimension == 0 {
            continue;
        }
        let labels: Vec<String> = cell
            .representatives
            .iter()
            .map(|rep| render_monomial(rep.leading_term().unwrap(), &module))
            .collect();
        let mut labels = labels;
        labels.sort();
        computed.insert((x, s), labels);
    }
    assert_eq!(computed, oracle, "cohomology basis differs from the oracle set");
    assert_eq!(report.dimension(-7, 1), 0);
    assert_eq!(report.dimension(-9, 1), 1);
    assert_eq!(report.dimension(-14, 2), 1);
    assert_eq!(report.dimension(-15, 2), 0);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let classes: usize = oracle.values().map(Vec::len).sum();
    pass(2, &format!("{classes} classes equal the oracle set; {elapsed:?}"));
}

#[test]
fn criterion_03_level_zero() {
    let _guard = serial();
    let w = Window::new(-40, -2, 5, 0);
    let (module, slice, mut report) = bp_cohomology(&w);
    compute_v_actions(&mut report, &slice).unwrap();
    // towers at x = -2: dim 1 for every s <= s_max
    for s in 0..=5u32 {
        assert_eq!(report.dimension(-2, s), 1, "tower at (-2, {s})");
    }
    // per-cell dimensions: towers + odd-leading torsion words
    let tails = forbidden_tails(6);
    let towers = tower_words(38);
    let mut expected: std::collections::BTreeMap<(i32, u32), usize> = Default::default();
    for word in &towers {
        let x = -2 - word.iter().sum::<u32>() as i32;
        if x < -40 {
            continue;
        }
        for s in word.len() as u32..=5 {
            *expected.entry((x, s)).or_default() += 1;
        }
    }
    let mut torsion_labels: Vec<((i32, u32), String)> = Vec::new();
    for word in admissible_words_on_y1(38, 5) {
        if word.is_empty() || word[0] % 2 == 0 || ends_in_forbidden(&word, &tails) {
            continue;
        }
        let x = -2 - word.iter().sum::<u32>() as i32;
        let s = word.len() as u32;
        if x < -40 {
            continue;
        }
        *expected.entry((x, s)).or_default() += 1;
        let m = Monomial::new(&[], &word, 0, -2);
        torsion_labels.push(((x, s), render_monomial(&m, &module)));
    }
    let mut computed: std::collections::BTreeMap<(i32, u32), usize> = Default::default();
    for (&(x, s), cell) in &report.cells {
        if cell.dimension > 0 {
            computed.insert((x, s), cell.dimension);
        }
    }
    assert_eq!(computed, expected, "level-0 dimensions differ from the proposition");
    // v0 is injective on the towers ...
    for word in [vec![], vec![4u32], vec![8, 4]] {
        let x = -2 - word.iter().sum::<u32>() as i32;
        let s0 = word.len() as u32;
        let base_label = render_monomial(&Monomial::new(&[], &word, 0, -2), &module);
        let idx = (0..report.dimension(x, s0))
            .find(|&i| report.class_label(x, s0, i, &module).starts_with(&base_label))
            .unwrap_or_else(|| panic!("no tower class {base_label}"));
        let mut class = report.representatives(x, s0)[idx].clone();
        for s in s0 + 1..=5 {
            class = class.times_v(0);
            let v = class_vector(&class, x, s, &report, &slice).unwrap();
            assert!(!v.is_zero(), "v0-power of {base_label} died at s = {s}");
        }
    }
    // ... and zero on every torsion class
    for ((x, s), label) in &torsion_labels {
        let idx = (0..report.dimension(*x, *s))
            .find(|&i| report.class_label(*x, *s, i, &module) == *label)
            .unwrap_or_else(|| panic!("torsion class {label} not found at ({x}, {s})"));
        let rep = report.representatives(*x, *s)[idx].clone();
        let v = class_vector(&rep.times_v(0), *x, *s + 1, &report, &slice).unwrap();
        assert!(v.is_zero(), "v0 [{label}] should vanish");
    }
    pass(
        3,
        &format!(
            "towers and {} torsion classes match; v0-action as stated",
            torsion_labels.len()
        ),
    );
}

#[test]
fn criterion_04_level_one_sawtooth() {
    let _guard = serial();
    let w = Window::new(-18, -2, 6, 1);
    let (_module, slice, report) = bp_cohomology(&w);
    let class_of = |word: &[u32]| -> Element {
        let m = Monomial::new(&[], word, 0, -2);
        let b = m.bidegree();
        report
            .representatives(b.x, b.s)
            .iter()
            .find(|rep| *rep.leading_term().unwrap() == m)
            .unwrap_or_else(|| panic!("no class led by {word:?}"))
            .clone()
    };
    let r7 = class_of(&[7]);
    let v0r7 = class_vector(&r7.times_v(0), -9, 2, &report, &slice).unwrap();
    let v1r9 = class_vector(&class_of(&[9]).times_v(1), -9, 2, &report, &slice).unwrap();
    assert!(!v0r7.is_zero(), "v0 [R7 y1] = 0");
    assert_eq!(v0r7, v1r9, "v0 [R7 y1] != v1 [R9 y1]");
    let v1r7 = class_vector(&r7.times_v(1), -7, 2, &report, &slice).unwrap();
    assert!(v1r7.is_zero(), "v1 [R7 y1] != 0");
    // v0^k [R7 y1] = v1^k [R^(7+2k) y1] for k <= 4
    for k in 1..=4u32 {
        let mut lhs = r7.clone();
        for _ in 0..k {
            lhs = lhs.times_v(0);
        }
        let mut rhs = class_of(&[7 + 2 * k]);
        for _ in 0..k {
            rhs = rhs.times_v(1);
        }
        let cell = (-9i32, 1 + k);
        let l = class_vector(&lhs, cell.0, cell.1, &report, &slice).unwrap();
        let r = class_vector(&rhs, cell.0, cell.1, &report, &slice).unwrap();
        assert!(!l.is_zero(), "v0^{k} [R7 y1] = 0");
        assert_eq!(l, r, "sawtooth identity fails at k = {k}");
    }
    pass(4, "v0^k [R7 y1] = v1^k [R^(7+2k) y1] for k <= 4, v1 [R7 y1] = 0");
}

#[test]
fn criterion_05_level_one_bockstein() {
    let _guard = serial();
    let w = Window::new(-26, -2, 4, 1);
    let module = bp_preset_for_window(&w);
    let entries = bockstein_d1(1, &w, &module).unwrap();
    let hits: Vec<&str> = entries
        .iter()
        .filter(|e| e.source_label == "R13 R6 y1")
        .map(|e| e.target_label.as_str())
        .collect();
    assert_eq!(hits, vec!["R15 R7 y1"], "d1(R13 R6 y1)");
    // d1 vanishes on every class led by an odd-odd admissible word
    let odd_odd = |label: &str| -> bool {
        let parts: Vec<&str> = label.split_whitespace().collect();
        if parts.len() < 3 || !parts[0].starts_with('R') || !parts[1].starts_with('R') {
            return false;
        }
        let a: u32 = parts[0][1..].parse().unwrap_or(0);
        let b: u32 = parts[1][1..].parse().unwrap_or(0);
        a % 2 == 1 && b % 2 == 1
    };
    for e in &entries {
        assert!(
            !odd_odd(&e.source_label),
            "d1 nonzero on odd-odd class {}",
            e.source_label
        );
    }
    pass(
        5,
        &format!(
            "d1(R13 R6 y1) = v1 [R15 R7 y1]; {} differentials, none on odd-odd classes",
            entries.len()
        ),
    );
}

#[test]
fn criterion_06_level_two_weight_two() {
    let _guard = serial();
    let start = Instant::now();
    // (a) hidden extension v0 [R15 R7 y1] = v2 [R19 R9 y1] != 0
    let (ok, detail) = selftest::golden_level_two();
    assert!(ok, "{detail}");

    // (b) the weight-2 basis over x in [-44, -2] against the three-family
    // description, read off the leading weight of each canonical class:
    //
    //   weight 0: the free module on y1 (only its v0-column has x <= -2);
    //   weight 1: the sawtooth module on R^a y1, a >= 7 odd, presented by
    //             g5 = 0 and v0 g_a = v1 g_(a+2) + v2 g_(a+6) (the level-2
    //             form of the (v0,v1) relation; its v2-truncation is the
    //             usual two-term identity), with per-cell dimensions
    //             recomputed here by independent linear algebra;
    //   weight 2: the (v0,v2)-sawtooths on R^a R^b y1, b >= 7, a > 2b,
    //             a, b odd — one class per chain per filtration >= 2,
    //             i.e. #{b odd >= 7 : 3b <= -x-3} at even x.
    let w = Window::new(-44, -2, 6, 2);
    let (module, slice, report) = bp_cohomology(&w);
    let mut cells_checked = 0usize;
    for x in -44i32..=-2 {
        for s in 0..=6u32 {
            let mut tags = [0usize; 3];
            let reps = report.representatives(x, s);
            for rep in reps {
                let wgt = rep.leading_term().unwrap().bidegree().w as usize;
                if wgt <= 2 {
                    tags[wgt] += 1;
                }
            }
            let want0 = usize::from(x == -2);
            let want1 = sawtooth_module_dim(x, s);
            let want2 = if s >= 2 && x % 2 == 0 {
                let total = -x - 2;
                ((7..).step_by(2).take_while(|b| 3 * b + 1 <= total))
                    .filter(|&b| (total - b) % 2 == 1 && total - b > 2 * b)
                    .count()
            } else {
                0
            };
            assert_eq!(
                tags,
                [want0, want1, want2],
                "weight census at ({x}, {s}) disagrees with the three families"
            );
            cells_checked += 1;
        }
    }

    // (c) the level-2 form of the weight-1 relation, on classes:
    // v0 g7 + v1 g9 = v2 g13 exactly (so the two-term identity holds
    // modulo v2-multiples), with v2 g13 itself nonzero
    let class_of = |word: &[u32]| -> Element {
        let m = Monomial::new(&[], word, 0, -2);
        let b = m.bidegree();
        report
            .representatives(b.x, b.s)
            .iter()
            .find(|rep| *rep.leading_term().unwrap() == m)
            .unwrap_or_else(|| panic!("no class led by {word:?}"))
            .clone()
    };
    let mut lhs = class_of(&[7]).times_v(0);
    lhs.add_assign(&class_of(&[9]).times_v(1));
    let lhs = class_vector(&lhs, -9, 2, &report, &slice).unwrap();
    let rhs = class_vector(&class_of(&[13]).times_v(2), -9, 2, &report, &slice).unwrap();
    assert!(!rhs.is_zero(), "v2 [R13 y1] vanished");
    assert_eq!(lhs, rhs, "v0 g7 + v1 g9 != v2 g13");

    // (d) figure label discrepancy: the first-chain class at (-36, 2) is
    // R23 R11 y1; R24 R11 y1 is not even a cycle
    let fig_class = Monomial::new(&[], &[23, 11], 0, -2);
    assert!(
        report
            .representatives(-36, 2)
            .iter()
            .any(|rep| *rep.leading_term().unwrap() == fig_class),
        "no class led by R23 R11 y1 at (-36, 2)"
    );
    let not_cycle = Monomial::new(&[], &[24, 11], 0, -2);
    assert!(
        !differential(&not_cycle, 2, &module).is_zero(),
        "R24 R11 y1 unexpectedly a cycle"
    );
    println!(
        "note: figure label R24 R11 y1 resolved by computation to R23 R11 y1 \
         (R24 R11 y1 supports a differential)"
    );
    pass(
        6,
        &format!(
            "hidden extension; weight census over {cells_checked} cells matches the three \
             families; {:?}",
            start.elapsed()
        ),
    );
}

/// Per-cell dimension of the abstract weight-1 module
/// `F2[v0,v1,v2]{g_a : a >= 7 odd}` with `g5 = 0` and
/// `v0 g_a = v1 g_(a+2) + v2 g_(a+6)` for all odd `a >= 5`, computed by
/// plain rank arithmetic (independent of the complex machinery).
fn sawtooth_module_dim(x: i32, s: u32) -> usize {
    if s == 0 {
        return 0;
    }
    let mut index: std::collections::BTreeMap<(u32, u32, u32, i32), usize> = Default::default();
    for e1 in 0..s {
        for e2 in 0..s - e1 {
            let e0 = s - 1 - e1 - e2;
            let a = 2 * e1 as i32 + 6 * e2 as i32 - 2 - x;
            if a >= 7 && a % 2 == 1 {
                let next = index.len();
                index.insert((e0, e1, e2, a), next);
            }
        }
    }
    let mut rows: Vec<Vec<usize>> = Vec::new();
    if s >= 2 {
        for k1 in 0..s - 1 {
            for k2 in 0..s - 1 - k1 {
                let k0 = s - 2 - k1 - k2;
                let a = 2 * k1 as i32 + 6 * k2 as i32 - 2 - x;
                if a < 5 || a % 2 == 0 {
                    continue;
                }
                let mut row = Vec::new();
                if a >= 7 {
                    row.push(index[&(k0 + 1, k1, k2, a)]);
                }
                row.push(index[&(k0, k1 + 1, k2, a + 2)]);
                row.push(index[&(k0, k1, k2 + 1, a + 6)]);
                rows.push(row);
            }
        }
    }
    let mut m = koszul_core::gf2::Gf2Matrix::zeros(rows.len(), index.len());
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            m.set(i, j, true);
        }
    }
    let (_, rank, _) = koszul_core::gf2::rref_and_rank(&m);
    index.len() - rank
}

#[test]
fn criterion_07_critical_groups() {
    let _guard = serial();
    let start = Instant::now();
    // independent oracle from the constraint set
    let oracle = |n: u32| -> Vec<String> {
        let mut out = vec!["v0^3 y1".to_string()];
        for i in 3..=n {
            let total = (1u32 << (i + 1)) - 2;
            for b in (7..total).step_by(2) {
                let a = total - b;
                if a % 2 == 1 && a > 2 * b {
                    out.push(format!("v{i} R{a} R{b} y1"));
                }
            }
        }
        out.sort();
        out
    };
    for n in [3, 4, 5] {
        let module = bp_preset_for_window(&critical_window(n));
        let classes = critical_group(n, &module).unwrap();
        let mut labels: Vec<String> = classes
            .iter()
            .map(|c| render_monomial(&c.leading, &module))
            .collect();
        labels.sort();
        assert_eq!(labels, oracle(n as u32), "critical group at n = {n}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    pass(
        7,
        &format!("n=3: 1 class, n=4: 3 classes, n=5: 10 classes; {elapsed:?}"),
    );
}

#[test]
fn criterion_08_weight_two_degeneration() {
    let _guard = serial();
    let start = Instant::now();
    let w = Window::new(-40, -2, 6, 2);
    for n_hi in [3, 4] {
        let report = stability_check(2, n_hi, &w, 2).unwrap();
        assert!(
            report.all_equal(),
            "mismatches at n_hi = {n_hi}: {:?}",
            report.mismatches()
        );
    }
    pass(
        8,
        &format!("levels 3 and 4 degenerate in weight <= 2; {:?}", start.elapsed()),
    );
}

#[test]
fn criterion_09_big_relation() {
    let _guard = serial();
    let start = Instant::now();
    let residual = verify_big_relation().unwrap();
    assert!(residual.is_zero(), "nonzero residual");
    for skip in 0..10 {
        let r = big_relation_residual_without(skip);
        assert!(!r.is_zero(), "deleting summand {skip} still cancels");
    }
    // frozen regression: the residual with the first summand deleted is
    // exactly that summand's expansion
    let first_deleted = render_qpolynomial(&big_relation_residual_without(0));
    assert_eq!(
        first_deleted,
        "x^4*Q12(Q8(x)) + (Q3(x))^2*(Q8(x))^2 + (Q3(x))^2*Q11(Q7(x)) + \
         (Q4(x))^2*Q10(Q6(x)) + (Q5(x))^2*Q9(Q5(x)) + (Q6(x))^2*Q8(Q4(x)) + \
         Q17(Q11(x)) + Q18(Q10(x))"
    );
    for (name, t) in big_relation_terms() {
        assert_eq!(t.homogeneous_degree(), Some(30), "summand {name}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        9,
        &format!("residual 0; all ten deletions nonzero; {elapsed:?}"),
    );
}

#[test]
fn criterion_10_adem_identities() {
    let _guard = serial();
    let y1 = |word: &[u32]| Element::single(Monomial::new(&[], word, 0, -2));
    assert_eq!(apply_r(9, &y1(&[5]), -1), Element::zero());
    assert_eq!(apply_r(8, &y1(&[5]), -1), y1(&[9, 4]));
    assert_eq!(
        apply_r(16, &apply_r(8, &y1(&[5]), -1), -1),
        y1(&[17, 8, 4])
    );
    assert!(koszul_core::dyer_lashof::adem_reduce_q(9, 4)
        .unwrap()
        .is_empty());
    let x = QPolynomial::generator("x", 2);
    let lhs = q_apply(22, &q_apply(6, &x));
    let mut rhs = q_apply(17, &q_apply(11, &x));
    rhs.add_assign(&q_apply(15, &q_apply(13, &x)));
    assert_eq!(lhs, rhs);
    pass(10, "R- and Q-side identities exact");
}

#[test]
fn criterion_11_property_suites() {
    let _guard = serial();
    let start = Instant::now();
    for (name, f) in [
        ("confluence-R", selftest::confluence_r as fn() -> (bool, String)),
        ("confluence-Q", selftest::confluence_q),
        ("confluence-v", selftest::confluence_v),
        ("gf2-oracles", selftest::gf2_oracles),
    ] {
        let (ok, detail) = f();
        assert!(ok, "{name}: {detail}");
    }
    // degree preservation of normalization: every term of R^a applied to
    // a monomial lands at bidegree + (-a, 1, 1)
    let module = koszul_core::presentation::bp_preset(3).unwrap();
    let w = Window::new(-30, -2, 4, 2);
    let basis = koszul_core::complex::enumerate_basis(&w, &module);
    let mut applications = 0usize;
    for cell in basis.values() {
        for m in cell {
            let b = m.bidegree();
            for a in [6u32, 9, 17] {
                applications += 1;
                for t in apply_r(a, &Element::single(m.clone()), 2).terms() {
                    let tb = t.bidegree();
                    assert_eq!(
                        (tb.x, tb.s, tb.w),
                        (b.x - a as i32, b.s + 1, b.w + 1),
                        "degree law fails on R{a} applied to {}",
                        render_monomial(m, &module)
                    );
                }
            }
        }
    }
    assert!(applications > 1000);
    // Cartan split-independence on random homogeneous factors <= degree 24
    let mut rng = 0x243F6A8885A308D3u64;
    let mut next = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    let random_factor = |next: &mut dyn FnMut() -> u64| -> QPolynomial {
        let x = QPolynomial::generator("x", 2);
        let mut p = x;
        for _ in 0..(next() % 3) {
            let d = p.homogeneous_degree().unwrap() as u64;
            let s = (d + 1 + next() % (d + 2)) as u32;
            let q = q_apply(s, &p);
            if q.is_zero() || q.homogeneous_degree().unwrap_or(25) > 8 {
                break;
            }
            p = q;
        }
        p
    };
    let mut coassoc = 0usize;
    for _ in 0..40 {
        let u = random_factor(&mut next);
        let v = random_factor(&mut next);
        let w = random_factor(&mut next);
        let total = u.homogeneous_degree().unwrap()
            + v.homogeneous_degree().unwrap()
            + w.homogeneous_degree().unwrap();
        if total > 24 {
            continue;
        }
        let s = (total as u32) + 1 + (next() % 6) as u32;
        let direct = q_apply(s, &multiply(&multiply(&u, &v), &w));
        let mut left_split = QPolynomial::zero();
        let mut right_split = QPolynomial::zero();
        for i in 0..=s {
            left_split.add_assign(&multiply(&q_apply(i, &u), &q_apply(s - i, &multiply(&v, &w))));
            right_split
                .add_assign(&multiply(&q_apply(i, &multiply(&u, &v)), &q_apply(s - i, &w)));
        }
        assert_eq!(direct, left_split, "Cartan left split differs");
        assert_eq!(direct, right_split, "Cartan right split differs");
        coassoc += 1;
    }
    assert!(coassoc >= 20, "only {coassoc} coassociativity samples");
    // squaring consistency on the same random factors
    for _ in 0..20 {
        let u = random_factor(&mut next);
        if let Some(d) = u.homogeneous_degree() {
            assert_eq!(q_apply(d as u32, &u), multiply(&u, &u));
        }
    }
    pass(
        11,
        &format!(
            "confluence, degree law ({applications} applications), {coassoc} Cartan splits, gf2 oracles; {:?}",
            start.elapsed()
        ),
    );
}
