//! Example models shipped with the crate.

use crate::error::{Error, Result};
use crate::io::model_file::ModelFile;
use crate::model::ExperimentModel;

const SPIN3: &str = include_str!("../../assets/spin3.json");
const TRIANGLE6: &str = include_str!("../../assets/triangle6.json");

pub const BUNDLED_NAMES: [&str; 2] = ["spin3", "triangle6"];

pub fn bundled_source(name: &str) -> Option<&'static str> {
    match name {
        "spin3" => Some(SPIN3),
        "triangle6" => Some(TRIANGLE6),
        _ => None,
    }
}

pub fn bundled(name: &str) -> Result<ExperimentModel> {
    let text = bundled_source(name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled model named `{name}`")))?;
    ModelFile::from_json(text)?.into_model()
}

pub fn spin3() -> ExperimentModel {
    bundled("spin3").expect("bundled spin3 model loads")
}

pub fn triangle6() -> ExperimentModel {
    bundled("triangle6").expect("bundled triangle6 model loads")
}
