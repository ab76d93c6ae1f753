use std::fmt;
use std::sync::OnceLock;

use super::JetError;

/// Largest number of independent variables a jet can carry.
pub const MAX_DIMS: usize = 3;
/// Largest truncation order a jet can carry.
pub const MAX_ORDER: usize = 8;

/// Exponent tuple of a monomial `x^a y^b z^c`.
///
/// Unused trailing variables carry exponent zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exps: [u8; MAX_DIMS],
}

impl MultiIndex {
    pub fn new(exponents: &[usize]) -> Result<Self, JetError> {
        if exponents.len() > MAX_DIMS {
            return Err(JetError::UnsupportedDims(exponents.len()));
        }
        let mut exps = [0u8; MAX_DIMS];
        for (slot, &e) in exps.iter_mut().zip(exponents) {
            if e > MAX_ORDER {
                return Err(JetError::OrderOverflow {
                    requested: e,
                    available: MAX_ORDER,
                });
            }
            *slot = e as u8;
        }
        Ok(Self { exps })
    }

    pub fn zero() -> Self {
        Self { exps: [0; MAX_DIMS] }
    }

    /// Unit index `e_var`.
    pub fn unit(var: usize) -> Self {
        let mut exps = [0u8; MAX_DIMS];
        exps[var] = 1;
        Self { exps }
    }

    pub fn exponent(&self, var: usize) -> usize {
        self.exps[var] as usize
    }

    pub fn exponents(&self) -> [usize; MAX_DIMS] {
        self.exps.map(usize::from)
    }

    pub fn order(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    /// `α! = α_1! α_2! α_3!`
    pub fn factorial(&self) -> f64 {
        self.exps
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product()
    }

    fn packed(&self) -> usize {
        let s = MAX_ORDER + 1;
        (self.exps[0] as usize * s + self.exps[1] as usize) * s + self.exps[2] as usize
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.exps[0], self.exps[1], self.exps[2])
    }
}

/// Monomial enumeration and product table for one `(dims, order)` pair.
pub(crate) struct Layout {
    pub(crate) dims: usize,
    pub(crate) order: usize,
    pub(crate) indices: Vec<MultiIndex>,
    /// `degree_start[d]..degree_start[d + 1]` holds the monomials of total degree `d`.
    pub(crate) degree_start: Vec<usize>,
    lookup: Vec<u32>,
    /// `(i, j, k)`: monomial `i` times monomial `j` lands on monomial `k`.
    pub(crate) products: Vec<(u32, u32, u32)>,
}

const ABSENT: u32 = u32::MAX;

impl Layout {
    fn build(dims: usize, order: usize) -> Self {
        let mut indices = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for degree in 0..=order {
            degree_start.push(indices.len());
            let mut buf = [0usize; MAX_DIMS];
            push_degree(dims, degree, 0, &mut buf, &mut indices);
        }
        degree_start.push(indices.len());

        let s = MAX_ORDER + 1;
        let mut lookup = vec![ABSENT; s * s * s];
        for (i, idx) in indices.iter().enumerate() {
            lookup[idx.packed()] = i as u32;
        }

        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.order() + b.order() > order {
                    continue;
                }
                let mut exps = [0u8; MAX_DIMS];
                for v in 0..MAX_DIMS {
                    exps[v] = a.exps[v] + b.exps[v];
                }
                let k = lookup[MultiIndex { exps }.packed()];
                products.push((i as u32, j as u32, k));
            }
        }

        Self {
            dims,
            order,
            indices,
            degree_start,
            lookup,
            products,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.indices.len()
    }

    pub(crate) fn position(&self, idx: &MultiIndex) -> Option<usize> {
        if idx.order() > self.order || idx.exps[self.dims..].iter().any(|&e| e != 0) {
            return None;
        }
        match self.lookup[idx.packed()] {
            ABSENT => None,
            p => Some(p as usize),
        }
    }

    pub(crate) fn degree_range(&self, degree: usize) -> std::ops::Range<usize> {
        self.degree_start[degree]..self.degree_start[degree + 1]
    }
}

// Graded lexicographic: within a degree, larger exponents of earlier variables come first.
fn push_degree(
    dims: usize,
    remaining: usize,
    var: usize,
    buf: &mut [usize; MAX_DIMS],
    out: &mut Vec<MultiIndex>,
) {
    if var + 1 == dims {
        buf[var] = remaining;
        let mut exps = [0u8; MAX_DIMS];
        for v in 0..dims {
            exps[v] = buf[v] as u8;
        }
        out.push(MultiIndex { exps });
        return;
    }
    for e in (0..=remaining).rev() {
        buf[var] = e;
        push_degree(dims, remaining - e, var + 1, buf, out);
    }
}

static LAYOUTS: [[OnceLock<Layout>; MAX_ORDER + 1]; MAX_DIMS + 1] =
    [const { [const { OnceLock::new() }; MAX_ORDER + 1] }; MAX_DIMS + 1];

pub(crate) fn layout(dims: usize, order: usize) -> Result<&'static Layout, JetError> {
    if dims == 0 || dims > MAX_DIMS {
        return Err(JetError::UnsupportedDims(dims));
    }
    if order > MAX_ORDER {
        return Err(JetError::OrderOverflow {
            requested: order,
            available: MAX_ORDER,
        });
    }
    Ok(LAYOUTS[dims][order].get_or_init(|| Layout::build(dims, order)))
}

/// Number of monomials of total degree at most `order` in `dims` variables.
pub fn monomial_count(dims: usize, order: usize) -> usize {
    // C(order + dims, dims)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 1..=dims {
        num *= order + i;
        den *= i;
    }
    num / den
}
