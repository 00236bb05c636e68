//! The finite subshift language, sliding-block codes on it, and the
//! exhaustive centralizer probe.

pub mod code;
pub mod language;
pub mod phi;
pub mod probe;

pub use code::{
    code_inputs, enumerate_codes, enumerate_codes_seq, find_inverse, invertible_codes,
    shift_power_code, table_space, BlockCode,
};
pub use language::{language, LanguageTable, CLASSIFY_EVIDENCE_DEPTH};
pub use phi::{
    phi_map, phi_map_normalized, psi_conjugation_check, recover_offset, window_stage_for,
    OriginWord, PhiMatching, PhiPair, PsiViolation,
};
pub use probe::{
    centralizer_probe, default_test_len, ProbeReport, ProbeScope, ProbeSurvivor,
};
