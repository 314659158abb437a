//! Central limit machinery for sequences satisfying Kargin's Condition A:
//! the condition checker, moments of normalized sums, the limit law and the
//! regression residual used to identify it.

mod condition_a;
mod oracle;
mod partition;
mod sums;

pub use condition_a::{
    check_condition_a, check_condition_a_cumulants, forms_agree, CheckForm, ConditionAReport,
    ConditionId, MixedCumulants, Violation,
};
pub use oracle::{
    Alphabet, ClassicalOracle, FamilySource, FreeOracle, MomentSource, PatternEntry, PatternOracle,
    PatternSource, PlantedOracle, TableOracle, TableOracleSpec,
};
pub use partition::{falling_factorial, set_partitions, SetPartition};
pub use sums::{
    clt_limit_law, convergence_table, exhaustive_sum_moment, free_sum_moments, lemma6_residual,
    lemma6_residual_for, max_error_by_n, normalize_moments, normalized_sum_moments,
    pattern_sum_moment, pattern_sum_moments, ConvergenceRow, Moment, NormalizedSum, SequenceSpec,
};
