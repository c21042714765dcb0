//! Koszul complexes for modules over the mod-2 Dyer-Lashof operation
//! algebra with exterior Milnor-primitive actions.
//!
//! The engine enumerates the admissible-monomial basis
//! `v_0^{k_0} ... v_n^{k_n} R^{a_1} ... R^{a_m} y` of the Koszul cochain
//! complex of a module presentation over a bidegree window, assembles the
//! differential over F_2, computes cohomology with canonical
//! representatives and the induced `v_i`-module structure, and walks
//! Bockstein first pages between truncation levels. A separate module
//! implements the free allowable R-algebra on graded generators
//! (Dyer-Lashof operations proper) and verifies the ten-term relation in
//! degree 30 on a degree-2 class.

pub mod chart;
pub mod cohomology;
pub mod complex;
pub mod dyer_lashof;
pub mod error;
pub mod gf2;
pub mod ops;
pub mod presentation;
pub mod selftest;

pub use chart::{ChartClass, ChartDocument, ChartLine, ChartMetadata};
pub use cohomology::{
    BocksteinEntry, CellCohomology, CohomologyReport, CriticalClass, StabilityCell,
    StabilityReport,
};
pub use complex::{ComplexSlice, D2Report, DiffConvention, Window};
pub use dyer_lashof::{QMonomial, QPolynomial};
pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Gf2Vector};
pub use ops::{Bidegree, Element, Monomial};
pub use presentation::{DiffTerm, Generator, ModulePresentation};
