//! Convergence sweeps, comparison problems, bound-state counts and the
//! annulus oracle built on top of the discretization and the solvers.

pub mod bessel;
pub mod count;
pub mod ladder;
pub mod oracle;
pub mod output;
pub mod resolvent;
pub mod strip;
pub mod sweep;

pub use count::{count_bound_states, BoundStateCount};
pub use resolvent::{default_shift, resolvent_gap_sweep, GapReport, ResolventGap};
pub use output::{write_gap_csv, write_sweep_csv, Summary};
pub use oracle::{annulus_oracle, NeumannSide};
pub use ladder::{observed_order, romberg, GridLadder};
pub use strip::{
    effective_extrapolated, one_d_extrapolated, strip_extrapolated, strip_spectrum, transverse_nu,
    transverse_nu_detailed, truncation_check, Extrapolated, StripProblem, TransverseEstimate, TruncationCheck,
};
pub use sweep::{
    check_thm2, dirichlet_compare, robin_sweep, sweep_thm1, LimitFit, RemainderSummary, SweepKind, SweepOptions,
    SweepRecord, SweepReport,
};
