use serde::{Deserialize, Serialize};

use crate::dom::NodeId;
use crate::protocol::{CritiqueIssue, CritiqueReport, IssueCategory};
use crate::render::{diff_images, downsample, DiffError, DiffOptions, ImageError, LayoutBox, PixelBox, RasterImage};

#[derive(Debug, thiserror::Error)]
pub enum CriticError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("critic backend failed: {0}")]
    Backend(String),
}

/// What a critic sees after a turn's actions were applied.
pub struct CritiqueInput<'a> {
    pub instruction: &'a str,
    pub original: Option<&'a RasterImage>,
    pub render: &'a RasterImage,
    pub layout: &'a [LayoutBox],
}

pub trait Critic: Send {
    fn name(&self) -> &str;

    /// `None` when the critic has nothing to compare against.
    fn critique(&mut self, input: &CritiqueInput<'_>) -> Result<Option<CritiqueReport>, CriticError>;
}

/// Never reports anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCritic;

impl Critic for NoCritic {
    fn name(&self) -> &str {
        "none"
    }

    fn critique(&mut self, _input: &CritiqueInput<'_>) -> Result<Option<CritiqueReport>, CriticError> {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct DiffCriticOptions {
    /// Largest mismatched-pixel fraction still reported as clean.
    pub threshold: f64,
    /// Largest per-channel difference still counted as a match.
    pub tolerance: u8,
    pub grid_rows: u32,
    pub grid_cols: u32,
}

impl Default for DiffCriticOptions {
    fn default() -> Self {
        Self {
            threshold: 0.005,
            tolerance: 16,
            grid_rows: 8,
            grid_cols: 8,
        }
    }
}

impl DiffCriticOptions {
    pub fn diff_options(&self) -> DiffOptions {
        DiffOptions {
            tolerance: self.tolerance,
            grid_rows: self.grid_rows,
            grid_cols: self.grid_cols,
        }
    }
}

/// Pixel-diff critic: one spatial-conflict issue per grid cell whose
/// mismatch exceeds the threshold.
#[derive(Debug, Clone, Default)]
pub struct DiffCritic {
    pub options: DiffCriticOptions,
}

impl DiffCritic {
    pub fn new(options: DiffCriticOptions) -> Self {
        Self { options }
    }

    /// Compares two images, resampling both to their common minimum size.
    pub fn compare(
        &self,
        original: &RasterImage,
        render: &RasterImage,
        layout: &[LayoutBox],
    ) -> Result<CritiqueReport, CriticError> {
        let w = original.width().min(render.width());
        let h = original.height().min(render.height());
        let a = downsample(original, w, h)?;
        let b = downsample(render, w, h)?;
        let report = diff_images(&a, &b, &self.options.diff_options())?;
        if report.mismatched_pixel_fraction <= self.options.threshold {
            return Ok(CritiqueReport::default());
        }
        let sx = f64::from(w) / f64::from(render.width());
        let sy = f64::from(h) / f64::from(render.height());
        let issues = report
            .per_region_scores
            .iter()
            .filter(|c| c.mismatch_fraction > self.options.threshold)
            .map(|cell| {
                let b = cell.bounds;
                CritiqueIssue {
                    category: IssueCategory::SpatialConflict,
                    description: format!(
                        "region row {} col {} at ({}, {})-({}, {}) differs in {:.1}% of pixels",
                        cell.row,
                        cell.col,
                        b.x0,
                        b.y0,
                        b.x1,
                        b.y1,
                        cell.mismatch_fraction * 100.0
                    ),
                    target_ids: targets_in(layout, &b, sx, sy),
                }
            })
            .collect();
        Ok(CritiqueReport::from_issues(issues))
    }
}

fn targets_in(layout: &[LayoutBox], cell: &PixelBox, sx: f64, sy: f64) -> Vec<NodeId> {
    layout
        .iter()
        .filter(|lb| {
            let r = &lb.bounds;
            let px = PixelBox {
                x0: (r.x0 * sx).floor().max(0.0) as u32,
                y0: (r.y0 * sy).floor().max(0.0) as u32,
                x1: (r.x1 * sx).ceil().max(0.0) as u32,
                y1: (r.y1 * sy).ceil().max(0.0) as u32,
            };
            px.intersects(cell)
        })
        .map(|lb| lb.id.clone())
        .collect()
}

impl Critic for DiffCritic {
    fn name(&self) -> &str {
        "diff"
    }

    fn critique(&mut self, input: &CritiqueInput<'_>) -> Result<Option<CritiqueReport>, CriticError> {
        match input.original {
            Some(orig) => self.compare(orig, input.render, input.layout).map(Some),
            None => Ok(None),
        }
    }
}

impl Critic for Box<dyn Critic> {
    fn name(&self) -> &str {
        self.as_ref().name()
    }

    fn critique(&mut self, input: &CritiqueInput<'_>) -> Result<Option<CritiqueReport>, CriticError> {
        self.as_mut().critique(input)
    }
}
