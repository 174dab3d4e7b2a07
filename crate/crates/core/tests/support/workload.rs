//! Token cost of correcting one element: full regeneration vs one Modify.

use slate_core::protocol::WordPunctCounter;
use slate_core::workload::{correction_cost, correction_texts, synthetic_svg, CorrectionCost, WORKLOAD_SIZES};

/// Independent word-punct count: one token per maximal alphanumeric run and
/// one per other non-space character.
pub fn oracle_count(text: &str) -> u64 {
    let mut count = 0;
    let mut in_word = false;
    for c in text.chars() {
        if c.is_alphanumeric() {
            if !in_word {
                count += 1;
            }
            in_word = true;
        } else {
            in_word = false;
            if !c.is_whitespace() {
                count += 1;
            }
        }
    }
    count
}

/// Tokens of the cheapest element line in a synthetic document.
pub fn per_element_floor() -> u64 {
    let one = synthetic_svg(1);
    let start = one.find("<rect").unwrap();
    let end = one[start..].find("/>").unwrap() + start + 2;
    oracle_count(&one[start..end])
}

pub fn costs() -> Vec<CorrectionCost> {
    WORKLOAD_SIZES.iter().map(|&n| correction_cost(n, &WordPunctCounter)).collect()
}

/// Checks the cost trend; returns the costs for reporting.
pub fn check_trend() -> Result<Vec<CorrectionCost>, String> {
    let costs = costs();
    for c in &costs {
        let (regen, modify) = correction_texts(c.elements);
        if c.regeneration != oracle_count(&regen) || c.modification != oracle_count(&modify) {
            return Err(format!("N={}: counter disagrees with the oracle count", c.elements));
        }
        let floor = per_element_floor() * c.elements as u64;
        if c.regeneration < floor {
            return Err(format!("N={}: regeneration {} below linear floor {floor}", c.elements, c.regeneration));
        }
    }
    if costs.windows(2).any(|w| w[0].modification != w[1].modification) {
        return Err(format!(
            "modification cost varies with N: {:?}",
            costs.iter().map(|c| c.modification).collect::<Vec<_>>()
        ));
    }
    let (small, large) = (costs.first().unwrap(), costs.last().unwrap());
    if large.ratio() < 10.0 * small.ratio() {
        return Err(format!("ratio(N={}) = {:.1} < 10 x ratio(N={}) = {:.1}", large.elements, large.ratio(), small.elements, small.ratio()));
    }
    Ok(costs)
}
