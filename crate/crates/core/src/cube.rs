//! Vertices of the ±1-cube, Hamming geometry, and subcube faces.
//!
//! A vertex of `{-1,+1}^d` is stored as a `u128` bitset: bit `i` is set iff
//! coordinate `i` equals `+1`. Positions at or above `dim` are always zero.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 128;

#[inline]
pub(crate) fn dim_mask(dim: usize) -> u128 {
    if dim >= 128 {
        u128::MAX
    } else {
        (1u128 << dim) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeVertex {
    dim: u8,
    bits: u128,
}

impl CubeVertex {
    pub fn new(dim: usize, bits: u128) -> Result<Self> {
        check_dim(dim)?;
        if bits & !dim_mask(dim) != 0 {
            return Err(Error::StrayBits(dim));
        }
        Ok(Self {
            dim: (dim - 1) as u8,
            bits,
        })
    }

    /// `-1` (all bits clear).
    pub fn all_minus(dim: usize) -> Result<Self> {
        Self::new(dim, 0)
    }

    /// `+1` (all bits set).
    pub fn all_plus(dim: usize) -> Result<Self> {
        Self::new(dim, dim_mask(dim))
    }

    /// Builds a vertex from `±1` entries.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        check_dim(signs.len())?;
        let mut bits = 0u128;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => bits |= 1 << i,
                -1 => {}
                other => {
                    return Err(Error::InvalidParameters(format!(
                        "coordinate {i} has value {other}, expected -1 or +1"
                    )))
                }
            }
        }
        Self::new(signs.len(), bits)
    }

    /// The affine map `x -> 2x - 1` from a 0/1 point.
    pub fn from_01(point: &[u8]) -> Result<Self> {
        check_dim(point.len())?;
        let mut bits = 0u128;
        for (i, &x) in point.iter().enumerate() {
            match x {
                0 => {}
                1 => bits |= 1 << i,
                v => {
                    return Err(Error::NotZeroOne {
                        index: i,
                        value: v as i64,
                    })
                }
            }
        }
        Self::new(point.len(), bits)
    }

    pub fn to_01(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| self.bit(i) as u8).collect()
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize + 1
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// Coordinate `i` as `-1` or `+1`.
    #[inline]
    pub fn coord(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            dim: self.dim,
            bits: !self.bits & dim_mask(self.dim()),
        }
    }

    /// Number of `+1` coordinates.
    pub fn count_plus(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Debug for CubeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if self.bit(i) { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

fn check_same_dim(v: &CubeVertex, w: &CubeVertex) -> Result<()> {
    if v.dim != w.dim {
        Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: w.dim(),
        })
    } else {
        Ok(())
    }
}

pub fn hamming_distance(v: &CubeVertex, w: &CubeVertex) -> Result<u32> {
    check_same_dim(v, w)?;
    Ok((v.bits ^ w.bits).count_ones())
}

/// The smallest cube face containing two distinct vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubcubeFace {
    anchor: CubeVertex,
    partner: CubeVertex,
    free: u128,
}

impl SubcubeFace {
    pub fn new(anchor: CubeVertex, partner: CubeVertex) -> Result<Self> {
        check_same_dim(&anchor, &partner)?;
        if anchor == partner {
            return Err(Error::DegenerateFace);
        }
        Ok(Self {
            anchor,
            partner,
            free: anchor.bits ^ partner.bits,
        })
    }

    pub fn anchor(&self) -> CubeVertex {
        self.anchor
    }

    pub fn partner(&self) -> CubeVertex {
        self.partner
    }

    /// Bit mask of the coordinates where anchor and partner disagree.
    pub fn free_coords(&self) -> u128 {
        self.free
    }

    /// Dimension of the face (the Hamming distance of its endpoints).
    pub fn dim(&self) -> u32 {
        self.free.count_ones()
    }

    /// Whether `u` lies in the face, endpoints included.
    #[inline]
    pub fn contains(&self, u: &CubeVertex) -> bool {
        u.dim == self.anchor.dim && (u.bits ^ self.anchor.bits) & !self.free == 0
    }

    /// Whether `u` lies in the face but is neither endpoint.
    #[inline]
    pub fn contains_interior(&self, u: &CubeVertex) -> bool {
        self.contains(u) && *u != self.anchor && *u != self.partner
    }

    pub fn iter(&self, include_endpoints: bool) -> FaceIter {
        FaceIter {
            face: *self,
            next: Some(0),
            include_endpoints,
        }
    }
}

/// Walks the submasks of the free coordinates.
#[derive(Clone, Debug)]
pub struct FaceIter {
    face: SubcubeFace,
    next: Option<u128>,
    include_endpoints: bool,
}

impl Iterator for FaceIter {
    type Item = CubeVertex;

    fn next(&mut self) -> Option<CubeVertex> {
        loop {
            let sub = self.next?;
            let free = self.face.free;
            let succ = sub.wrapping_sub(free) & free;
            self.next = (succ != 0).then_some(succ);
            let v = CubeVertex {
                dim: self.face.anchor.dim,
                bits: (self.face.anchor.bits & !free) | sub,
            };
            if self.include_endpoints || (v != self.face.anchor && v != self.face.partner) {
                return Some(v);
            }
        }
    }
}

/// Points of `□(v,w)`, or of `□*(v,w)` when endpoints are excluded.
pub fn enumerate_face(v: CubeVertex, w: CubeVertex, include_endpoints: bool) -> Result<FaceIter> {
    Ok(SubcubeFace::new(v, w)?.iter(include_endpoints))
}

/// An ordered, duplicate-free set of cube vertices of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    dim: usize,
    members: Vec<CubeVertex>,
}

impl VertexSet {
    pub fn new(dim: usize, members: Vec<CubeVertex>) -> Result<Self> {
        check_dim(dim)?;
        let mut seen = HashSet::with_capacity(members.len());
        for v in &members {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if !seen.insert(v.bits) {
                return Err(Error::DuplicateVertex);
            }
        }
        Ok(Self { dim, members })
    }

    /// All `2^dim` vertices in increasing bit order.
    pub fn full_cube(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if dim > 24 {
            return Err(Error::BudgetExceeded {
                required: 1u128 << dim.min(127),
                budget: 1 << 24,
            });
        }
        let members = (0..1u128 << dim)
            .map(|bits| CubeVertex {
                dim: (dim - 1) as u8,
                bits,
            })
            .collect();
        Ok(Self { dim, members })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CubeVertex] {
        &self.members
    }

    pub fn contains(&self, v: &CubeVertex) -> bool {
        self.members.contains(v)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CubeVertex> {
        self.members.iter()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a CubeVertex;
    type IntoIter = std::slice::Iter<'a, CubeVertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// A uniformly random `n`-subset of `{-1,+1}^d`, in draw order.
pub fn sample_vertex_set<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<VertexSet> {
    check_dim(d)?;
    if d < 127 && (n as u128) > (1u128 << d) {
        return Err(Error::InvalidParameters(format!(
            "n = {n} exceeds 2^{d} cube vertices"
        )));
    }
    let tag = (d - 1) as u8;
    // Dense requests: shuffle the whole cube and take a prefix.
    if d < 127 && (n as u128) > (1u128 << (d - 1)) {
        let mut all: Vec<u128> = (0..1u128 << d).collect();
        let (head, _) = all.partial_shuffle(rng, n);
        let members = head
            .iter()
            .map(|&bits| CubeVertex { dim: tag, bits })
            .collect();
        return Ok(VertexSet { dim: d, members });
    }
    let mask = dim_mask(d);
    let mut seen = HashSet::with_capacity(n);
    let mut members = Vec::with_capacity(n);
    while members.len() < n {
        let bits = rng.random::<u128>() & mask;
        if seen.insert(bits) {
            members.push(CubeVertex { dim: tag, bits });
        }
    }
    Ok(VertexSet { dim: d, members })
}

/// A uniformly random unordered pair of distinct members.
pub fn sample_pair<R: Rng + ?Sized>(
    x: &VertexSet,
    rng: &mut R,
) -> Result<(CubeVertex, CubeVertex)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least two vertices to pick a pair, got {n}"
        )));
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    Ok((x.members[i], x.members[j]))
}

/// Index of edge `{i, j}` (`i < j`) of `K_k` in lexicographic order.
fn edge_index(k: usize, i: usize, j: usize) -> usize {
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

/// Cut vectors of `K_k` mapped to `±1` coordinates, one per cut.
///
/// Vertex 0 is kept outside the shore `S`, so each cut appears exactly once;
/// the empty cut comes first and maps to `-1`.
pub fn cut_polytope_vertices(k: usize) -> Result<VertexSet> {
    if !(3..=7).contains(&k) {
        return Err(Error::InvalidParameters(format!(
            "cut polytope supported for 3 <= k <= 7, got {k}"
        )));
    }
    let dim = k * (k - 1) / 2;
    let members = (0u32..1 << (k - 1))
        .map(|shore| {
            let side = |v: usize| v > 0 && (shore >> (v - 1)) & 1 == 1;
            let mut bits = 0u128;
            for i in 0..k {
                for j in i + 1..k {
                    if side(i) != side(j) {
                        bits |= 1 << edge_index(k, i, j);
                    }
                }
            }
            CubeVertex {
                dim: (dim - 1) as u8,
                bits,
            }
        })
        .collect();
    Ok(VertexSet { dim, members })
}
