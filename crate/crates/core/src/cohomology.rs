//! Cohomology of assembled complexes, induced `v_i`-actions, the
//! critical obstruction group at `(x, s) = (-2, 3)`, Bockstein first
//! pages, and weight-truncated stability comparisons.
//!
//! Representatives are canonical: the cycle space is reduced modulo the
//! reduced-echelon basis of the boundary space and then echelonized, so
//! each class is printed with the lowest possible leading basis monomial
//! and results are reproducible bit for bit.

use std::collections::BTreeMap;

use crate::complex::{assemble, ComplexSlice, Window};
use crate::error::{Error, Result};
use crate::gf2::{kernel_basis, reduced_echelon, Gf2Matrix, Gf2Vector, SpanSolver};
use crate::ops::{render_monomial, v_degree, Element, Monomial};
use crate::presentation::ModulePresentation;

/// Cohomology of one bidegree cell.
#[derive(Debug, Clone)]
pub struct CellCohomology {
    pub dimension: usize,
    /// Canonical representative cycles, one per class, sorted by leading
    /// basis monomial.
    pub representatives: Vec<Element>,
    pub cycle_rank: usize,
    pub boundary_rank: usize,
    /// Echelonized boundary space in cell coordinates (used to reduce
    /// arbitrary cycles to classes).
    boundary_echelon: Vec<Gf2Vector>,
}

/// Per-bidegree cohomology over the valid sub-window of a slice.
#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub n: i32,
    pub window: Window,
    pub cells: BTreeMap<(i32, u32), CellCohomology>,
    /// `v_actions[i][(x, s)]` is the matrix of `v_i` from classes at
    /// `(x, s)` to classes at `(x + deg v_i, s + 1)`. Filled by
    /// [`compute_v_actions`]; empty until then.
    pub v_actions: BTreeMap<u32, BTreeMap<(i32, u32), Gf2Matrix>>,
}

impl CohomologyReport {
    pub fn dimension(&self, x: i32, s: u32) -> usize {
        self.cells.get(&(x, s)).map_or(0, |c| c.dimension)
    }

    pub fn representatives(&self, x: i32, s: u32) -> &[Element] {
        self.cells
            .get(&(x, s))
            .map_or(&[], |c| c.representatives.as_slice())
    }

    /// Leading-monomial label of one class, with a marker when the
    /// representative carries correction terms.
    pub fn class_label(&self, x: i32, s: u32, idx: usize, module: &ModulePresentation) -> String {
        let rep = &self.representatives(x, s)[idx];
        let lead = rep.leading_term().expect("nonzero representative");
        if rep.terms().len() > 1 {
            format!("{} (+{})", render_monomial(lead, module), rep.terms().len() - 1)
        } else {
            render_monomial(lead, module)
        }
    }
}

/// Per-bidegree kernel/image computation over F_2 with stored canonical
/// representatives. Requires `d^2 = 0` on the slice (checked by the
/// caller or the self-test).
pub fn cohomology(slice: &ComplexSlice) -> Result<CohomologyReport> {
    let w = *slice.window();
    let mut cells = BTreeMap::new();
    for x in w.x_min..=w.x_max {
        for s in 0..=w.s_max {
            let basis = slice.basis_at(x, s);
            if basis.is_empty() {
                continue;
            }
            let cell = cell_cohomology(slice, x, s)?;
            cells.insert((x, s), cell);
        }
    }
    Ok(CohomologyReport {
        n: w.n,
        window: w,
        cells,
        v_actions: BTreeMap::new(),
    })
}

/// Fills `report.v_actions` for every `i <= n`.
pub fn compute_v_actions(report: &mut CohomologyReport, slice: &ComplexSlice) -> Result<()> {
    let mut i = 0u32;
    while (i as i32) <= report.n {
        let action = v_action(i, report, slice)?;
        report.v_actions.insert(i, action);
        i += 1;
    }
    Ok(())
}

fn cell_cohomology(slice: &ComplexSlice, x: i32, s: u32) -> Result<CellCohomology> {
    let basis = slice.basis_at(x, s);
    let cycles: Vec<Gf2Vector> = match slice.matrix_at(x, s) {
        Some(m) => kernel_basis(m),
        None => {
            return Err(Error::Dimension(format!(
                "no outgoing matrix at ({x}, {s}); cell outside the assembled region"
            )))
        }
    };
    let boundary_echelon = match (s > 0).then(|| slice.matrix_at(x + 1, s - 1)).flatten() {
        Some(m_in) => {
            let cols: Vec<Gf2Vector> = (0..m_in.cols()).map(|j| m_in.column(j)).collect();
            reduced_echelon(&cols)
        }
        None => Vec::new(),
    };
    let mut reduced: Vec<Gf2Vector> = Vec::new();
    for z in &cycles {
        let mut v = z.clone();
        for b in &boundary_echelon {
            if let Some(lead) = b.leading_bit() {
                if v.get(lead) {
                    v.xor_assign(b);
                }
            }
        }
        if !v.is_zero() {
            reduced.push(v);
        }
    }
    let reps_vec = reduced_echelon(&reduced);
    debug_assert_eq!(reps_vec.len(), cycles.len() - boundary_echelon.len());
    let representatives: Vec<Element> = reps_vec
        .iter()
        .map(|v| {
            Element::from_terms(v.support().iter().map(|&i| basis[i].clone()).collect())
        })
        .collect();
    Ok(CellCohomology {
        dimension: representatives.len(),
        representatives,
        cycle_rank: cycles.len(),
        boundary_rank: boundary_echelon.len(),
        boundary_echelon,
    })
}

/// Expresses the class of a cycle in the representative basis of its
/// cell. Errors if the element is not a cycle-plus-boundary of the cell.
pub fn class_vector(
    e: &Element,
    x: i32,
    s: u32,
    report: &CohomologyReport,
    slice: &ComplexSlice,
) -> Result<Gf2Vector> {
    let Some(cell) = report.cells.get(&(x, s)) else {
        if e.is_zero() {
            return Ok(Gf2Vector::zeros(0));
        }
        return Err(Error::Dimension(format!("no cohomology cell at ({x}, {s})")));
    };
    let coords = slice.coordinates(e, x, s)?;
    let solver = cell_solver(cell, slice, x, s)?;
    match solver.solve(&coords)? {
        Some(coeffs) => {
            let mut out = Gf2Vector::zeros(cell.dimension);
            for i in coeffs.support() {
                if i < cell.dimension {
                    out.flip(i);
                }
            }
            Ok(out)
        }
        None => Err(Error::Dimension(format!(
            "element at ({x}, {s}) is not a cycle modulo boundaries"
        ))),
    }
}

/// Solver over `[representatives; boundary basis]` of one cell: the
/// leading coefficients express a cycle's class in the representative
/// basis.
fn cell_solver(
    cell: &CellCohomology,
    slice: &ComplexSlice,
    x: i32,
    s: u32,
) -> Result<SpanSolver> {
    let mut span: Vec<Gf2Vector> = cell
        .representatives
        .iter()
        .map(|r| slice.coordinates(r, x, s))
        .collect::<Result<_>>()?;
    span.extend(cell.boundary_echelon.iter().cloned());
    SpanSolver::new(&span, slice.basis_at(x, s).len())
}

/// The map `[z] -> [v_i z]` on cohomology, one matrix per source cell
/// whose target cell also lies in the window. `v_i` is central and
/// commutes with the differential, so the map is well defined.
pub fn v_action(
    i: u32,
    report: &CohomologyReport,
    slice: &ComplexSlice,
) -> Result<BTreeMap<(i32, u32), Gf2Matrix>> {
    if i as i32 > slice.n() {
        return Err(Error::Truncation { i, n: slice.n() });
    }
    let w = report.window;
    let mut out = BTreeMap::new();
    for (&(x, s), cell) in &report.cells {
        if cell.dimension == 0 {
            continue;
        }
        let (tx, ts) = (x + v_degree(i), s + 1);
        if !w.contains(tx, ts) {
            continue;
        }
        let t_dim = report.dimension(tx, ts);
        let mut matrix = Gf2Matrix::zeros(t_dim, cell.dimension);
        let solver = match report.cells.get(&(tx, ts)) {
            Some(target) => Some(cell_solver(target, slice, tx, ts)?),
            None => None,
        };
        for (j, rep) in cell.representatives.iter().enumerate() {
            let image = rep.times_v(i);
            let coords = slice.coordinates(&image, tx, ts)?;
            let Some(solver) = &solver else {
                if coords.is_zero() {
                    continue;
                }
                return Err(Error::Dimension(format!(
                    "v{i} image lands in an empty cell at ({tx}, {ts})"
                )));
            };
            let class = solver.solve(&coords)?.ok_or_else(|| {
                Error::Dimension(format!(
                    "v{i} image at ({tx}, {ts}) is not a cycle modulo boundaries"
                ))
            })?;
            for r in class.support().into_iter().filter(|&r| r < t_dim) {
                matrix.set(r, j, true);
            }
        }
        out.insert((x, s), matrix);
    }
    Ok(out)
}

/// One class of the critical group, tagged with its weight.
#[derive(Debug, Clone)]
pub struct CriticalClass {
    pub representative: Element,
    pub leading: Monomial,
    pub weight: u32,
    /// True when the representative is a single monomial.
    pub exact: bool,
}

/// The window sufficient to compute the critical cell `(-2, 3)`:
/// neighbors in both directions plus assembly padding.
pub fn critical_window(n: i32) -> Window {
    Window::new(-3, -1, 4, n)
}

/// The full basis of cohomology at `(x, s) = (-2, 3)` — the first
/// obstruction group — computed from an automatically sized window.
pub fn critical_group(n: i32, module: &ModulePresentation) -> Result<Vec<CriticalClass>> {
    if n < 0 {
        return Err(Error::Presentation(
            "critical group needs truncation level n >= 0".into(),
        ));
    }
    let w = critical_window(n);
    let slice = assemble(&w, module)?;
    let report = cohomology(&slice)?;
    Ok(report
        .representatives(-2, 3)
        .iter()
        .map(|rep| {
            let leading = rep.leading_term().expect("nonzero representative").clone();
            let weight = leading.bidegree().w;
            CriticalClass {
                exact: rep.terms().len() == 1,
                representative: rep.clone(),
                leading,
                weight,
            }
        })
        .collect())
}

/// One nonzero `d_1` in the `v_n`-Bockstein spectral sequence.
#[derive(Debug, Clone)]
pub struct BocksteinEntry {
    pub source_cell: (i32, u32),
    pub source_index: usize,
    pub source_label: String,
    pub target_cell: (i32, u32),
    /// Class coordinates of the target in the level-(n-1) representative
    /// basis of `target_cell`.
    pub target_class: Gf2Vector,
    pub target_label: String,
    pub v_index: u32,
}

/// First Bockstein differentials into level `n`: for each representative
/// cycle `z` at level `n - 1`, computes `d(z)` in the level-`n` complex,
/// strips the single `v_n` from its `v_n`-divisible part, and reduces the
/// result modulo level-(n-1) boundaries. Only nonzero `d_1`'s are listed.
pub fn bockstein_d1(
    n: i32,
    w: &Window,
    module: &ModulePresentation,
) -> Result<Vec<BocksteinEntry>> {
    if n < 0 {
        return Err(Error::Presentation("bockstein_d1 needs n >= 0".into()));
    }
    let w_lo = Window { n: n - 1, ..*w };
    let slice = assemble(&w_lo, module)?;
    let report = cohomology(&slice)?;
    let mut entries = Vec::new();
    for (&(x, s), cell) in &report.cells {
        let (tx, ts) = (x - 1 - v_degree(n as u32), s);
        if !w_lo.contains(tx, ts) {
            continue;
        }
        for (idx, rep) in cell.representatives.iter().enumerate() {
            let mut image = Element::zero();
            for t in rep.terms() {
                image.add_assign(&crate::complex::differential(t, n, module));
            }
            // the v_n-free part is d(z) at level n-1, which vanishes
            let mut stripped = Element::zero();
            for t in image.terms() {
                let e = t.v_exponent(n as u32);
                debug_assert!(e <= 1, "d adds at most one v_n");
                if e == 1 {
                    stripped.add_monomial(strip_one_v(t, n as u32));
                }
            }
            if stripped.is_zero() {
                continue;
            }
            let class = class_vector(&stripped, tx, ts, &report, &slice)?;
            if class.is_zero() {
                continue;
            }
            let target_label = class
                .support()
                .iter()
                .map(|&r| report.class_label(tx, ts, r, module))
                .collect::<Vec<_>>()
                .join(" + ");
            entries.push(BocksteinEntry {
                source_cell: (x, s),
                source_index: idx,
                source_label: report.class_label(x, s, idx, module),
                target_cell: (tx, ts),
                target_class: class,
                target_label,
                v_index: n as u32,
            });
        }
    }
    Ok(entries)
}

fn strip_one_v(m: &Monomial, i: u32) -> Monomial {
    let mut v = m.v_exponents().to_vec();
    v[i as usize] -= 1;
    Monomial::new(&v, m.r_word(), m.generator_index(), m.generator_degree())
}

/// Dimension comparison for one bidegree in a stability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityCell {
    /// dim H at level `n_hi` (weight-truncated).
    pub computed: usize,
    /// dim predicted by tensoring level-`n_lo` classes with monomials in
    /// `v_(n_lo+1) .. v_n_hi`.
    pub predicted: usize,
    /// dim H at level `n_lo` in the same cell (no tensor correction).
    pub lo_raw: usize,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub n_lo: i32,
    pub n_hi: i32,
    pub weight_max: u32,
    pub window: Window,
    /// Cells where any of the three counts is nonzero.
    pub cells: BTreeMap<(i32, u32), StabilityCell>,
}

impl StabilityReport {
    pub fn all_equal(&self) -> bool {
        self.cells.values().all(|c| c.computed == c.predicted)
    }

    pub fn mismatches(&self) -> Vec<((i32, u32), StabilityCell)> {
        self.cells
            .iter()
            .filter(|(_, c)| c.computed != c.predicted)
            .map(|(&k, &c)| (k, c))
            .collect()
    }
}

/// Compares weight-truncated cohomology at level `n_hi` against the
/// degenerate-Bockstein prediction from level `n_lo`: classes at the low
/// level tensored with polynomial generators `v_(n_lo+1), ..., v_(n_hi)`.
pub fn stability_check(
    n_lo: i32,
    n_hi: i32,
    w: &Window,
    weight_max: u32,
) -> Result<StabilityReport> {
    stability_check_with_module(n_lo, n_hi, w, weight_max, None)
}

pub fn stability_check_with_module(
    n_lo: i32,
    n_hi: i32,
    w: &Window,
    weight_max: u32,
    module: Option<&ModulePresentation>,
) -> Result<StabilityReport> {
    if n_lo >= n_hi {
        return Err(Error::Presentation(format!(
            "stability check needs n_lo < n_hi, got {n_lo} >= {n_hi}"
        )));
    }
    let w_hi = Window {
        n: n_hi,
        weight_max: Some(weight_max),
        ..*w
    };
    // Low-level classes below the window can still tensor into it: a
    // class at (xc, sc) reaches (x, s) only when x - xc is at most
    // (s - sc) * deg(v_n_hi). Compute the low level in bands, one
    // filtration at a time, so the deep-x region is only explored at the
    // low filtrations that can actually contribute.
    let vdeg_hi = v_degree(n_hi as u32);
    let deepest = (w.x_min as i64 - w.s_max as i64 * vdeg_hi as i64) as i32;
    let owned;
    let module = match module {
        Some(m) => m,
        None => {
            let cover = Window {
                n: n_hi,
                x_min: deepest,
                ..*w
            };
            owned = crate::complex::bp_preset_for_window(&cover);
            &owned
        }
    };
    let report_hi = cohomology(&assemble(&w_hi, module)?)?;
    let mut lo_dims: BTreeMap<(i32, u32), usize> = BTreeMap::new();
    for sc in 0..=w.s_max {
        let band = Window {
            n: n_lo,
            weight_max: Some(weight_max),
            x_min: (w.x_min as i64 - (w.s_max - sc) as i64 * vdeg_hi as i64) as i32,
            x_max: w.x_max,
            s_max: sc,
        };
        let band_report = cohomology(&assemble(&band, module)?)?;
        for (&(x, s), cell) in &band_report.cells {
            if s == sc && cell.dimension > 0 {
                lo_dims.insert((x, s), cell.dimension);
            }
        }
    }

    let mut cells = BTreeMap::new();
    for x in w.x_min..=w.x_max {
        for s in 0..=w.s_max {
            let computed = report_hi.dimension(x, s);
            let mut predicted = 0usize;
            for (&(xc, sc), &dim) in &lo_dims {
                if sc > s {
                    continue;
                }
                let count = count_v_monomials(n_lo + 1, n_hi, x - xc, s - sc);
                predicted += dim * count;
            }
            let lo_raw = lo_dims.get(&(x, s)).copied().unwrap_or(0);
            if computed != 0 || predicted != 0 || lo_raw != 0 {
                cells.insert(
                    (x, s),
                    StabilityCell {
                        computed,
                        predicted,
                        lo_raw,
                    },
                );
            }
        }
    }
    Ok(StabilityReport {
        n_lo,
        n_hi,
        weight_max,
        window: *w,
        cells,
    })
}

/// Number of monomials in `v_lo .. v_hi` with total degree `dx` and
/// exponent sum `ds`.
fn count_v_monomials(lo: i32, hi: i32, dx: i32, ds: u32) -> usize {
    if dx < 0 {
        return 0;
    }
    if lo > hi {
        return usize::from(dx == 0 && ds == 0);
    }
    let d = v_degree(lo as u32);
    let mut total = 0;
    for e in 0..=ds {
        let used = e as i64 * d as i64;
        if used > dx as i64 {
            break;
        }
        total += count_v_monomials(lo + 1, hi, dx - used as i32, ds - e);
    }
    total
}

/// Human-readable structure lines: `v_0`-towers, sawtooth identities
/// `v_0 [c] = v_k [c']`, and raw images where no template matches.
pub fn annotate_structure(
    report: &CohomologyReport,
    module: &ModulePresentation,
) -> Vec<String> {
    let mut lines = Vec::new();
    // towers: chains under v0 starting from classes with no v0-preimage
    let mut has_v0_preimage: BTreeMap<((i32, u32), usize), bool> = BTreeMap::new();
    if let Some(v0) = report.v_actions.get(&0) {
        for (&(x, s), m) in v0 {
            for j in 0..m.cols() {
                for r in m.column(j).support() {
                    has_v0_preimage.insert(((x, s + 1), r), true);
                }
            }
        }
        for (&(x, s), cell) in &report.cells {
            for j in 0..cell.dimension {
                if has_v0_preimage.contains_key(&((x, s), j)) {
                    continue;
                }
                let mut height = 0;
                let (mut cx, mut cs, mut cj) = (x, s, j);
                while let Some(m) = v0.get(&(cx, cs)) {
                    let img = m.column(cj);
                    let sup = img.support();
                    if sup.len() != 1 {
                        break;
                    }
                    height += 1;
                    (cx, cs, cj) = (cx, cs + 1, sup[0]);
                }
                if height >= 2 {
                    lines.push(format!(
                        "v0-tower on {} at ({x}, {s}), height >= {height} in window",
                        report.class_label(x, s, j, module)
                    ));
                }
            }
        }
    }
    // sawtooth identities: v0[c] = vk[c'] for k >= 1
    let v0 = report.v_actions.get(&0);
    for (&k, vk) in report.v_actions.iter().filter(|(&k, _)| k >= 1) {
        for (&(x, s), mk) in vk {
            let (tx, ts) = (x + v_degree(k), s + 1);
            for j in 0..mk.cols() {
                let img_k = mk.column(j);
                if img_k.is_zero() {
                    continue;
                }
                // look for a class c at (tx - 0, ts - 1) with v0[c] equal
                let src0 = (tx, ts - 1);
                if let Some(m0) = v0.and_then(|a| a.get(&src0)) {
                    for j0 in 0..m0.cols() {
                        if m0.column(j0) == img_k {
                            lines.push(format!(
                                "v0 [{}] = v{k} [{}] at ({tx}, {ts})",
                                report.class_label(src0.0, src0.1, j0, module),
                                report.class_label(x, s, j, module)
                            ));
                        }
                    }
                }
                if img_k.support().len() > 1 {
                    let targets = img_k
                        .support()
                        .iter()
                        .map(|&r| report.class_label(tx, ts, r, module))
                        .collect::<Vec<_>>()
                        .join(" + ");
                    lines.push(format!(
                        "v{k} [{}] = {} (no template)",
                        report.class_label(x, s, j, module),
                        targets
                    ));
                }
            }
        }
    }
    lines.sort();
    lines.dedup();
    lines
}
