//! Rooted tree addresses with finite truncation depth.
//!
//! Addresses are sequences of child digits from the root. All enumeration is
//! truncated at `max_depth`, a mandatory constructor parameter; reports that
//! depend on the truncation carry the depth used.

use crate::geom::Q;
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;

/// A word in the tree: the digit sequence of the path from the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address {
    digits: Vec<u8>,
}

impl Address {
    pub fn root() -> Self {
        Address { digits: Vec::new() }
    }

    pub fn from_digits(digits: &[u8]) -> Self {
        Address {
            digits: digits.to_vec(),
        }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn parent(&self) -> Address {
        if self.digits.is_empty() {
            return self.clone();
        }
        Address {
            digits: self.digits[..self.digits.len() - 1].to_vec(),
        }
    }

    pub fn child(&self, digit: u8) -> Address {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Address { digits }
    }

    pub fn last_digit(&self) -> Option<u8> {
        self.digits.last().copied()
    }

    /// Prefix of the first `depth` digits.
    pub fn truncate(&self, depth: usize) -> Address {
        Address {
            digits: self.digits[..depth.min(self.digits.len())].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.digits.len() >= self.digits.len()
            && other.digits[..self.digits.len()] == self.digits[..]
    }

    /// Ancestor at `levels` above; saturates at the root.
    pub fn ancestor(&self, levels: usize) -> Address {
        let keep = self.digits.len().saturating_sub(levels);
        self.truncate(keep)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Parses the `Display` form: `-` for the root, digits joined by `.`.
pub fn parse_address(s: &str) -> Option<Address> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Some(Address::root());
    }
    let mut digits = Vec::new();
    for part in s.split('.') {
        digits.push(part.parse().ok()?);
    }
    Some(Address::from_digits(&digits))
}

/// Longest common prefix of two addresses.
pub fn confluence(w: &Address, v: &Address) -> Address {
    let mut n = 0;
    let max = w.depth().min(v.depth());
    while n < max && w.digits()[n] == v.digits()[n] {
        n += 1;
    }
    w.truncate(n)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("address depth {depth} reaches the truncation horizon {max_depth}")]
    DepthExceeded { depth: usize, max_depth: usize },
    #[error("digit {digit} out of range for a vertex with {branching} children")]
    DigitOutOfRange { digit: u8, branching: u8 },
}

/// Branching data plus the truncation horizon.
///
/// `branching` gives the ambient child count of a vertex; subtree pruning by
/// partition families is layered on top and does not renumber digits.
#[derive(Clone)]
pub struct TreeShape {
    branching: Arc<dyn Fn(&Address) -> u8 + Send + Sync>,
    max_depth: usize,
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeShape")
            .field("max_depth", &self.max_depth)
            .finish()
    }
}

impl TreeShape {
    pub fn uniform(branching: u8, max_depth: usize) -> Self {
        assert!(branching >= 1);
        TreeShape {
            branching: Arc::new(move |_| branching),
            max_depth,
        }
    }

    pub fn with_branching<F>(f: F, max_depth: usize) -> Self
    where
        F: Fn(&Address) -> u8 + Send + Sync + 'static,
    {
        TreeShape {
            branching: Arc::new(f),
            max_depth,
        }
    }

    pub fn branching(&self, w: &Address) -> u8 {
        (self.branching)(w)
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn is_valid(&self, w: &Address) -> bool {
        if w.depth() > self.max_depth {
            return false;
        }
        let mut prefix = Address::root();
        for &d in w.digits() {
            if d >= self.branching(&prefix) {
                return false;
            }
            prefix = prefix.child(d);
        }
        true
    }

    pub fn children(&self, w: &Address) -> Result<Vec<Address>, TreeError> {
        if w.depth() >= self.max_depth {
            return Err(TreeError::DepthExceeded {
                depth: w.depth(),
                max_depth: self.max_depth,
            });
        }
        let b = self.branching(w);
        Ok((0..b).map(|d| w.child(d)).collect())
    }

    /// Every address of the given depth (ambient tree, no pruning).
    pub fn level(&self, depth: usize) -> Vec<Address> {
        assert!(depth <= self.max_depth);
        let mut out = vec![Address::root()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &out {
                let b = self.branching(w);
                for d in 0..b {
                    next.push(w.child(d));
                }
            }
            out = next;
        }
        out
    }
}

/// A geodesic ray truncated at the horizon: an address of full depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndPrefix {
    address: Address,
}

impl EndPrefix {
    pub fn new(shape: &TreeShape, address: Address) -> Result<Self, TreeError> {
        if address.depth() != shape.max_depth() {
            return Err(TreeError::DepthExceeded {
                depth: address.depth(),
                max_depth: shape.max_depth(),
            });
        }
        Ok(EndPrefix { address })
    }

    pub fn address(&self) -> &Address {
        &self.address
    }
}

/// 2^-(depth of the confluence), 0 for equal ends.
pub fn end_metric(a: &EndPrefix, b: &EndPrefix) -> Q {
    if a == b {
        return Q::zero();
    }
    let c = confluence(a.address(), b.address());
    Q::new(1, 1_i128 << c.depth().min(100))
}
