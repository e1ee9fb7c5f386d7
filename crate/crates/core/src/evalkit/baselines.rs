use rand::Rng;

use super::Prediction;
use crate::genset::Instance;

fn distinct_pairs(gold: &[Instance]) -> impl Iterator<Item = &Instance> {
    let mut seen = std::collections::HashSet::new();
    gold.iter()
        .filter(move |g| seen.insert((g.regex.as_str(), g.string.as_str())))
}

/// A fair coin per distinct gold pair.
pub fn baseline_random<R: Rng + ?Sized>(gold: &[Instance], rng: &mut R) -> Vec<Prediction> {
    distinct_pairs(gold)
        .map(|g| Prediction {
            regex: g.regex.clone(),
            string: g.string.clone(),
            pred: rng.gen_bool(0.5),
        })
        .collect()
}

/// The split's more frequent label everywhere; `true` on a tie.
pub fn baseline_majority(gold: &[Instance]) -> Vec<Prediction> {
    let positives = gold.iter().filter(|g| g.label).count();
    let pred = positives * 2 >= gold.len();
    distinct_pairs(gold)
        .map(|g| Prediction {
            regex: g.regex.clone(),
            string: g.string.clone(),
            pred,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::{mean_regex_accuracy, score};

    #[test]
    fn majority_on_balanced_split_is_fifty() {
        let gold: Vec<Instance> = (0..10)
            .map(|i| Instance {
                regex: "a*".into(),
                string: "a".repeat(i),
                label: i % 2 == 0,
            })
            .collect();
        let preds = baseline_majority(&gold);
        assert!(preds.iter().all(|p| p.pred));
        let s = score(&gold, &preds, true).unwrap();
        assert_eq!(mean_regex_accuracy(s.per_regex.values()).unwrap(), 50.0);
    }
}
