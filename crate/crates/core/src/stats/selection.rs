use serde::Serialize;

use super::StatsError;
use crate::indicators::{rank_table, IndicatorTable, RankOrder};
use crate::model::JournalId;

/// `⌊z·N/100⌋`.
pub fn top_count(population: usize, z: f64) -> Result<usize, StatsError> {
    if !(z > 0.0 && z <= 100.0) {
        return Err(StatsError::InvalidPercentage(z));
    }
    // The nudge keeps exact products such as 0.7·1000 from flooring low.
    let n = (z * population as f64 / 100.0 + 1e-9).floor() as usize;
    if n == 0 {
        return Err(StatsError::EmptySelection { z, population });
    }
    Ok(n.min(population))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopSelection {
    pub z: f64,
    /// Journals with DEFINED values.
    pub population: usize,
    pub n_z: usize,
    /// Selected journals in rank order.
    pub selected: Vec<JournalId>,
}

/// The top `z`% of journals with DEFINED values, in `rank_table` order
/// (value descending, then journal id ascending).
pub fn top_fraction(table: &IndicatorTable, z: f64) -> Result<TopSelection, StatsError> {
    let population = table.defined_count();
    if population == 0 {
        return Err(StatsError::NoDefinedValues);
    }
    let n_z = top_count(population, z)?;
    let selected = rank_table(table, RankOrder::Descending)
        .into_iter()
        .take(n_z)
        .map(|e| e.journal)
        .collect();
    Ok(TopSelection {
        z,
        population,
        n_z,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(top_count(3695, 10.0), Ok(369));
        assert_eq!(top_count(10, 10.0), Ok(1));
        assert_eq!(top_count(100, 25.0), Ok(25));
        assert_eq!(top_count(1000, 0.7), Ok(7));
        assert_eq!(top_count(10, 100.0), Ok(10));
        assert!(matches!(top_count(9, 10.0), Err(StatsError::EmptySelection { .. })));
        assert!(top_count(10, 0.0).is_err());
        assert!(top_count(10, 100.5).is_err());
    }

    #[test]
    fn threshold_tie_goes_to_smaller_id() {
        // 4 journals, z = 50 → 2 selected; b and c tie at the threshold.
        let t = IndicatorTable::from_values(
            "t",
            [("d", Some(1.0)), ("c", Some(2.0)), ("b", Some(2.0)), ("a", Some(3.0))],
        );
        let s = top_fraction(&t, 50.0).unwrap();
        assert_eq!(s.n_z, 2);
        let ids: Vec<&str> = s.selected.iter().map(|j| j.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn undefined_excluded_from_population() {
        let mut rows: Vec<(String, Option<f64>)> =
            (0..10).map(|i| (format!("j{i}"), Some(i as f64))).collect();
        rows.push(("x".into(), None));
        let t = IndicatorTable::from_values("t", rows.iter().map(|(j, v)| (j.as_str(), *v)));
        let s = top_fraction(&t, 20.0).unwrap();
        assert_eq!(s.population, 10);
        assert_eq!(s.n_z, 2);
        let all_undefined = IndicatorTable::from_values("t", [("x", None)]);
        assert_eq!(top_fraction(&all_undefined, 10.0), Err(StatsError::NoDefinedValues));
    }
}
