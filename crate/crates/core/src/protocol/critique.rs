use serde::{Deserialize, Serialize};

use crate::dom::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueCategory {
    AttributeError,
    FalseExistence,
    SpatialConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CritiqueIssue {
    pub category: IssueCategory,
    pub description: String,
    #[serde(default)]
    pub target_ids: Vec<NodeId>,
}

/// Structured discrepancies between the reference image and the render.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CritiqueReport {
    pub hallucination_detected: bool,
    #[serde(default)]
    pub issues: Vec<CritiqueIssue>,
    /// Free-form reviewer text, when the critic produces any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl CritiqueReport {
    pub fn from_issues(issues: Vec<CritiqueIssue>) -> Self {
        Self {
            hallucination_detected: !issues.is_empty(),
            issues,
            notes: None,
        }
    }
}
