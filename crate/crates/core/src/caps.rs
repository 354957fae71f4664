//! Size limits for the exhaustive enumerators.
//!
//! Defaults keep every computation desk-sized. `allow_large` lifts them to the
//! hard limits; the `PBL_CAPS` environment variable can only lower them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest row or column count for rectangle enumeration.
    pub rect_side: usize,
    /// Largest grid (in cells) for rectangle-partition enumeration.
    pub cc_cells: usize,
    /// Largest variable count for assignment enumeration.
    pub assign_n: usize,
    /// Largest variable count for subcube-partition enumeration.
    pub query_partition_n: usize,
    /// Largest number of labeled partitions streamed into one LP.
    pub labeled: u128,
    /// Largest number of labeled partitions for the direct pprt formulation.
    pub direct_labeled: u128,
    /// Largest grid side for the deterministic communication oracle.
    pub det_cc_side: usize,
    /// Largest variable count for the deterministic query oracle.
    pub det_query_n: usize,
    pub allow_large: bool,
}

/// Keys accepted by [`Caps::lower`] and `PBL_CAPS`.
pub const CAP_KEYS: &[&str] = &[
    "rect_side",
    "cc_cells",
    "assign_n",
    "query_partition_n",
    "labeled",
    "direct_labeled",
    "det_cc_side",
    "det_query_n",
];

impl Default for Caps {
    fn default() -> Self {
        Caps {
            rect_side: 4,
            cc_cells: 9,
            assign_n: 6,
            query_partition_n: 3,
            labeled: 200_000,
            direct_labeled: 10_000,
            det_cc_side: 4,
            det_query_n: 10,
            allow_large: false,
        }
    }
}

impl Caps {
    /// The ceiling reachable with `--allow-large`.
    pub fn large() -> Self {
        Caps {
            rect_side: 6,
            cc_cells: 16,
            assign_n: 8,
            query_partition_n: 4,
            labeled: 20_000_000,
            direct_labeled: 200_000,
            det_cc_side: 5,
            det_query_n: 12,
            allow_large: true,
        }
    }

    pub fn with_allow_large(allow: bool) -> Self {
        if allow {
            Caps::large()
        } else {
            Caps::default()
        }
    }

    /// Defaults (or large limits), then lowered by `PBL_CAPS` if set.
    pub fn from_env(allow_large: bool) -> Result<Self> {
        let mut caps = Caps::with_allow_large(allow_large);
        if let Ok(spec) = std::env::var("PBL_CAPS") {
            caps.apply_lowering(&spec)?;
        }
        Ok(caps)
    }

    fn get(&self, key: &str) -> Option<u128> {
        Some(match key {
            "rect_side" => self.rect_side as u128,
            "cc_cells" => self.cc_cells as u128,
            "assign_n" => self.assign_n as u128,
            "query_partition_n" => self.query_partition_n as u128,
            "labeled" => self.labeled,
            "direct_labeled" => self.direct_labeled,
            "det_cc_side" => self.det_cc_side as u128,
            "det_query_n" => self.det_query_n as u128,
            _ => return None,
        })
    }

    fn set(&mut self, key: &str, value: u128) {
        let small = value as usize;
        match key {
            "rect_side" => self.rect_side = small,
            "cc_cells" => self.cc_cells = small,
            "assign_n" => self.assign_n = small,
            "query_partition_n" => self.query_partition_n = small,
            "labeled" => self.labeled = value,
            "direct_labeled" => self.direct_labeled = value,
            "det_cc_side" => self.det_cc_side = small,
            "det_query_n" => self.det_query_n = small,
            _ => unreachable!("unknown cap key {key}"),
        }
    }

    /// Sets `key` to `value`, which must not exceed the current limit.
    pub fn lower(&mut self, key: &str, value: u128) -> Result<()> {
        let current = self
            .get(key)
            .ok_or_else(|| Error::malformed(format!("unknown cap `{key}`")))?;
        if value > current {
            return Err(Error::malformed(format!(
                "cap `{key}`={value} would raise the limit {current}"
            )));
        }
        self.set(key, value);
        Ok(())
    }

    /// Override `key`, allowing raises up to the `--allow-large` ceiling only
    /// when `allow_large` is set.
    pub fn override_cap(&mut self, key: &str, value: u128) -> Result<()> {
        let ceiling = Caps::with_allow_large(self.allow_large)
            .get(key)
            .ok_or_else(|| Error::malformed(format!("unknown cap `{key}`")))?;
        if value > ceiling {
            return Err(Error::CapExceeded {
                what: "cap override",
                value,
                limit: ceiling,
                large_available: !self.allow_large,
            });
        }
        self.set(key, value);
        Ok(())
    }

    /// Parses `key=value[,key=value...]` and lowers each cap.
    pub fn apply_lowering(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::malformed(format!("bad cap setting `{item}`")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::malformed(format!("bad cap value in `{item}`")))?;
            self.lower(key.trim(), value)?;
        }
        Ok(())
    }

    pub(crate) fn check(&self, what: &'static str, value: u128, limit: u128) -> Result<()> {
        if value > limit {
            Err(Error::CapExceeded {
                what,
                value,
                limit,
                large_available: !self.allow_large,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowering_never_raises() {
        let mut caps = Caps::default();
        caps.apply_lowering("cc_cells=4, labeled=100").unwrap();
        assert_eq!(caps.cc_cells, 4);
        assert_eq!(caps.labeled, 100);
        assert!(caps.apply_lowering("cc_cells=16").is_err());
        assert!(caps.apply_lowering("bogus=1").is_err());
    }

    #[test]
    fn overrides_respect_the_large_ceiling() {
        let mut caps = Caps::default();
        assert!(matches!(
            caps.override_cap("cc_cells", 16),
            Err(Error::CapExceeded { .. })
        ));
        let mut caps = Caps::large();
        caps.override_cap("cc_cells", 12).unwrap();
        assert_eq!(caps.cc_cells, 12);
        assert!(caps.override_cap("cc_cells", 17).is_err());
    }
}
