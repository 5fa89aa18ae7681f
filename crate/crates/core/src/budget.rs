//! Desk-scale limits. Every search that can blow up checks one of these and
//! reports an [`Error::Budget`](crate::Error::Budget) instead of truncating.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable holding comma-separated `key=value` budget overrides.
pub const BUDGET_ENV: &str = "RELTAIL_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Distinct nonempty traces allowed per fiber in an iterated cover.
    pub max_fiber_traces: usize,
    /// Random-set elements allowed in a materialized iterated cover.
    pub max_cover_elements: usize,
    /// Largest iteration depth accepted by counting and entropy sequences.
    pub max_depth: usize,
    /// Cells of `p` accepted by the delta-containment search.
    pub delta_max_cells: usize,
    /// Cells of `q` accepted by the delta-containment search.
    pub delta_max_k: usize,
    /// Total points of `E` accepted by vertex enumeration.
    pub vertex_max_points: usize,
    /// Joint admissible words materialized by symbolic brute force.
    pub sft_max_words: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_fiber_traces: 4096,
            max_cover_elements: 65_536,
            max_depth: 64,
            delta_max_cells: 8,
            delta_max_k: 4,
            vertex_max_points: 24,
            sft_max_words: 4096,
        }
    }
}

impl Budget {
    /// Default budget with overrides from [`BUDGET_ENV`] applied.
    pub fn from_env() -> Result<Self> {
        let mut b = Budget::default();
        if let Ok(spec) = std::env::var(BUDGET_ENV) {
            b.apply_overrides(&spec)?;
        }
        Ok(b)
    }

    /// Applies `key=value` pairs separated by commas.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                at: BUDGET_ENV.into(),
                msg: format!("expected key=value, got `{item}`"),
            })?;
            let v: usize = value.trim().parse().map_err(|_| Error::Parse {
                at: BUDGET_ENV.into(),
                msg: format!("`{value}` is not a nonnegative integer"),
            })?;
            let slot = match key.trim() {
                "max_fiber_traces" => &mut self.max_fiber_traces,
                "max_cover_elements" => &mut self.max_cover_elements,
                "max_depth" => &mut self.max_depth,
                "delta_max_cells" => &mut self.delta_max_cells,
                "delta_max_k" => &mut self.delta_max_k,
                "vertex_max_points" => &mut self.vertex_max_points,
                "sft_max_words" => &mut self.sft_max_words,
                other => {
                    return Err(Error::Parse {
                        at: BUDGET_ENV.into(),
                        msg: format!("unknown budget key `{other}`"),
                    })
                }
            };
            *slot = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut b = Budget::default();
        b.apply_overrides("max_depth=5, vertex_max_points=30").unwrap();
        assert_eq!(b.max_depth, 5);
        assert_eq!(b.vertex_max_points, 30);
        assert!(b.apply_overrides("nope=1").is_err());
        assert!(b.apply_overrides("max_depth").is_err());
    }
}
