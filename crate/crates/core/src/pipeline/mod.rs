//! Batch front end: job documents in, deterministic reports out.

pub mod job;
pub mod report;
pub mod run;

pub use job::{parse_job, FieldIssue, FormBlock, JobError, JobSpec, Mode};
pub use report::{digest, emit_report, Format, Verdict, VerdictReport};
pub use run::{exit, run_document, run_job, Overrides, RunOutcome};
