pub mod bundled;
pub mod model_file;
pub mod report;

pub use bundled::{bundled, spin3, triangle6};
pub use model_file::{load_model, model_hash, save_model, ModelFile};
pub use report::{Report, ReportKind};
