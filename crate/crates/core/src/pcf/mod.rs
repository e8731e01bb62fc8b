//! Post-critically finite self-similar sets and their Dirichlet forms.

pub mod degen;
pub mod harmonic;
pub mod measure;
pub mod structure;

pub use degen::{sg_degeneration_probe, vicsek_off_diagonal_mass, DegenerationReport};
pub use harmonic::{
    fw_star_spectrum, hausdorff_weight_dimension, helmert_basis, make_interval, make_sierpinski_gasket, make_vicsek,
    resistance_metric, validate_harmonic_structure, HarmonicStructure, Pcf, Spectrum, Validation,
};
pub use measure::{
    cell_energy_measure, cell_graph_metric, kusuoka_pair_measure, m2_constant, rescale_cell_pair,
    self_similar_measure, tautological_diameters, CellDiameters, CellGraphMetric, CellMeasure,
    HarmonicFunction, M2Report,
};
pub use structure::{build_level, LevelNetwork, SelfSimilarStructure, StructureFile, Word};
