use serde::{Deserialize, Serialize};
use std::fmt;

/// Axis-aligned pixel box stored in the native `[ymin, ymax, xmin, xmax]` order.
///
/// Boxes are kept exactly as annotated. A box that is not well-formed still
/// loads; it is only reported by the linter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct BoundingBox {
    pub ymin: i64,
    pub ymax: i64,
    pub xmin: i64,
    pub xmax: i64,
}

impl BoundingBox {
    pub const fn new(ymin: i64, ymax: i64, xmin: i64, xmax: i64) -> Self {
        Self {
            ymin,
            ymax,
            xmin,
            xmax,
        }
    }

    /// Non-negative coordinates with `ymin < ymax` and `xmin < xmax`.
    pub fn is_well_formed(&self) -> bool {
        self.ymin >= 0 && self.xmin >= 0 && self.ymin < self.ymax && self.xmin < self.xmax
    }

    pub fn height(&self) -> i64 {
        (self.ymax - self.ymin).max(0)
    }

    pub fn width(&self) -> i64 {
        (self.xmax - self.xmin).max(0)
    }

    /// Pixel area over half-open intervals; zero for inverted or flat boxes.
    pub fn area(&self) -> i64 {
        self.height() * self.width()
    }

    pub fn to_array(self) -> [i64; 4] {
        [self.ymin, self.ymax, self.xmin, self.xmax]
    }
}

impl From<[i64; 4]> for BoundingBox {
    fn from(c: [i64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<BoundingBox> for [i64; 4] {
    fn from(b: BoundingBox) -> Self {
        b.to_array()
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{},{},{}]",
            self.ymin, self.ymax, self.xmin, self.xmax
        )
    }
}
