//! The committed bar-chart correction fixture.

use std::fs;
use std::path::PathBuf;

use slate_core::agent::{read_jsonl, Task, TrajectoryStep};
use slate_core::render::RasterImage;

pub fn dir() -> PathBuf {
    super::repo_root().join("fixtures/bar_chart")
}

pub fn task() -> Task {
    let mut task: Task = serde_json::from_str(&fs::read_to_string(dir().join("task.json")).unwrap()).unwrap();
    let png = fs::read(dir().join(task.reference_image.as_ref().unwrap())).unwrap();
    task.original_image = Some(RasterImage::from_png(&png).unwrap());
    task
}

pub fn script() -> Vec<String> {
    serde_json::from_str(&fs::read_to_string(dir().join("script.json")).unwrap()).unwrap()
}

pub fn trajectory() -> Vec<TrajectoryStep> {
    read_jsonl(fs::read_to_string(dir().join("trajectory.jsonl")).unwrap().as_bytes()).unwrap()
}

/// Values of the corrected first bar.
pub const BAR1: [(&str, &str); 7] = [
    ("x", "20"),
    ("y", "20"),
    ("width", "70"),
    ("height", "450"),
    ("fill", "#a629a6"),
    ("rx", "4"),
    ("ry", "4"),
];
