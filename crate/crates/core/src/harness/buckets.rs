use serde::{Deserialize, Serialize};

/// Difficulty strata over the scorer's rank of the best gold tool.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketScheme {
    /// 1 / 2-5 / 6-20 / 21+
    #[default]
    Wide,
    /// 1 / 2-3 / 4-10 / 11+
    Narrow,
}

pub const BUCKET_LABELS: [&str; 4] = ["easy", "medium", "hard", "very_hard"];

impl BucketScheme {
    /// Inclusive lower rank bound of each bucket.
    fn lower_bounds(self) -> [usize; 4] {
        match self {
            BucketScheme::Wide => [1, 2, 6, 21],
            BucketScheme::Narrow => [1, 2, 4, 11],
        }
    }

    /// `"2-5"`-style rank range of bucket `index`.
    pub fn range_label(self, index: usize) -> String {
        let lo = self.lower_bounds();
        match lo.get(index + 1) {
            Some(next) if next - 1 == lo[index] => lo[index].to_string(),
            Some(next) => format!("{}-{}", lo[index], next - 1),
            None => format!("{}+", lo[index]),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BucketScheme::Wide => "wide",
            BucketScheme::Narrow => "narrow",
        }
    }
}

impl std::str::FromStr for BucketScheme {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "wide" => Ok(BucketScheme::Wide),
            "narrow" => Ok(BucketScheme::Narrow),
            other => Err(crate::Error::config(format!("unknown bucket scheme {other:?}"))),
        }
    }
}

/// Bucket index of a query. A gold tool missing from the list counts as
/// the hardest bucket.
pub fn bucketize(gold_rank: Option<usize>, scheme: BucketScheme) -> usize {
    let Some(rank) = gold_rank else {
        return BUCKET_LABELS.len() - 1;
    };
    scheme.lower_bounds().iter().rposition(|&lo| rank >= lo).unwrap_or(0)
}
