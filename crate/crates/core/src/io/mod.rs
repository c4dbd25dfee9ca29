//! File formats: run-record and prediction-log CSV, generalization triples,
//! PPM/PAM images, and leaderboard report rendering.

pub mod generalization;
pub mod pnm;
pub mod predictions;
pub mod report;
pub mod runs;

pub use generalization::{load_triples, parse_triples};
pub use pnm::{read_image, write_ppm};
pub use predictions::{load_predictions, parse_predictions};
pub use report::{parse_report_json, render_report, ReportFormat};
pub use runs::{load_runs, parse_runs, save_runs, write_runs};
