//! Entropy toolkit and the extraction experiment.

mod accounting;
mod entropy;
mod extraction;
mod facts;

pub use accounting::{
    information_accounting, AccountingMode, AccountingReport, E0_TOLERANCE, EXACT_MAX_N,
};
pub use entropy::{
    conditional_entropy, entropy, joint_entropy, mutual_information, EmpiricalDistribution,
};
pub use extraction::{bound_e_a, extract_ab, extract_from_bundle, ExtractionRecord};
pub use facts::{
    averaged_conditional_entropy, averaged_conditional_mi, check_information_facts,
    markov_bound_check, markov_random_checks, random_independent_joint, random_joint,
    superadditivity_terms, FactsReport, MarkovReport, MarkovSweep, FACTS_TOLERANCE,
};
