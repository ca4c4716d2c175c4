//! Cover diagrams and their Cech machinery.
//!
//! A cover diagram assigns a bigraded complex to every simplex of a finite
//! nerve together with restriction chain maps along face inclusions. From
//! it we assemble, for each fixed p, the double complex of Cech cochains
//! with values in the (p, s) spaces, its total complex with differential
//! `delta + (-1)^r dbar`, the relative complex that omits one piece of a
//! two-set cover, and the short exact sequence linking the two.
//!
//! All component orderings are fixed (simplices by dimension then
//! lexicographically, then basis index), so every assembled matrix is
//! reproducible entry for entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::bicomplex::{bd, Bidegree, BigradedComplex, ChainMap, CohomologyGroup};
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::sequence::ShortExactSequence;

/// A nerve simplex: a strictly increasing tuple of indices into the cover's
/// index set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Self {
        assert!(
            vertices.windows(2).all(|w| w[0] < w[1]),
            "simplex vertices must be strictly increasing"
        );
        assert!(!vertices.is_empty(), "empty simplex");
        Simplex(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces with the index of the omitted vertex.
    pub fn faces(&self) -> Vec<(usize, Simplex)> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|nu| {
                let mut v = self.0.clone();
                v.remove(nu);
                (nu, Simplex(v))
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.contains(v))
    }

    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_key(key: &str) -> Option<Simplex> {
        let vertices: Option<Vec<usize>> = key.split('.').map(|s| s.parse().ok()).collect();
        let vertices = vertices?;
        if vertices.is_empty() || !vertices.windows(2).all(|w| w[0] < w[1]) {
            return None;
        }
        Some(Simplex(vertices))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// A finite cover diagram: complexes on the nerve plus restriction chain
/// maps along codimension-one face inclusions (from the face's complex to
/// the simplex's complex). Extension maps, when present, go the other way
/// and are what the dual (current-side) diagram restricts along.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDiagram {
    pub name: String,
    pub index_set: Vec<String>,
    simplices: BTreeSet<Simplex>,
    complexes: BTreeMap<Simplex, BigradedComplex>,
    restrictions: BTreeMap<(Simplex, Simplex), ChainMap>,
    extensions: BTreeMap<(Simplex, Simplex), ChainMap>,
}

impl CoverDiagram {
    pub fn new(name: impl Into<String>, index_set: Vec<String>) -> Self {
        CoverDiagram {
            name: name.into(),
            index_set,
            simplices: BTreeSet::new(),
            complexes: BTreeMap::new(),
            restrictions: BTreeMap::new(),
            extensions: BTreeMap::new(),
        }
    }

    pub fn add_simplex(&mut self, s: Simplex) {
        self.simplices.insert(s);
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn simplices_of_dim(&self, r: usize) -> Vec<&Simplex> {
        self.simplices.iter().filter(|s| s.dim() == r).collect()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(Simplex::dim).max().unwrap_or(0)
    }

    pub fn set_piece(&mut self, s: Simplex, c: BigradedComplex) {
        self.simplices.insert(s.clone());
        self.complexes.insert(s, c);
    }

    pub fn complex_at(&self, s: &Simplex) -> Result<&BigradedComplex> {
        self.complexes.get(s).ok_or_else(|| Error::NoSuchPiece {
            name: self.name.clone(),
            label: s.key(),
        })
    }

    pub fn set_restriction(&mut self, face: Simplex, simplex: Simplex, map: ChainMap) {
        self.restrictions.insert((face, simplex), map);
    }

    pub fn restriction(&self, face: &Simplex, simplex: &Simplex) -> Result<&ChainMap> {
        self.restrictions
            .get(&(face.clone(), simplex.clone()))
            .ok_or_else(|| Error::NoSuchPiece {
                name: self.name.clone(),
                label: format!("restriction {} -> {}", face.key(), simplex.key()),
            })
    }

    pub fn set_extension(&mut self, face: Simplex, simplex: Simplex, map: ChainMap) {
        self.extensions.insert((face, simplex), map);
    }

    pub fn extension(&self, face: &Simplex, simplex: &Simplex) -> Result<&ChainMap> {
        self.extensions
            .get(&(face.clone(), simplex.clone()))
            .ok_or_else(|| Error::MissingExtensions {
                name: self.name.clone(),
            })
    }

    pub fn has_extensions(&self) -> bool {
        !self.extensions.is_empty()
    }

    pub fn restrictions(&self) -> impl Iterator<Item = (&(Simplex, Simplex), &ChainMap)> {
        self.restrictions.iter()
    }

    pub fn extensions(&self) -> impl Iterator<Item = (&(Simplex, Simplex), &ChainMap)> {
        self.extensions.iter()
    }

    /// Resolve a label from the index set to its vertex simplex.
    pub fn vertex_by_label(&self, label: &str) -> Result<Simplex> {
        let idx = self
            .index_set
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::NoSuchPiece {
                name: self.name.clone(),
                label: label.to_string(),
            })?;
        Ok(Simplex::vertex(idx))
    }

    /// The three simplices of a two-set cover, split by the label of the
    /// piece to omit: `(omitted vertex, kept vertex, overlap)`.
    pub fn two_set_split(&self, omit_label: &str) -> Result<(Simplex, Simplex, Simplex)> {
        if self.index_set.len() != 2 {
            return Err(Error::NotTwoSet {
                sets: self.index_set.len(),
            });
        }
        let omitted = self.vertex_by_label(omit_label)?;
        let kept_idx = 1 - omitted.vertices()[0];
        let kept = Simplex::vertex(kept_idx);
        let overlap = Simplex::new(vec![0, 1]);
        for s in [&omitted, &kept, &overlap] {
            if !self.simplices.contains(s) {
                return Err(Error::NoSuchPiece {
                    name: self.name.clone(),
                    label: s.key(),
                });
            }
        }
        Ok((omitted, kept, overlap))
    }

    /// Every violation of the diagram axioms: closed nerve, assigned and
    /// valid pieces, restriction chain maps of the right shape along every
    /// codimension-one inclusion, and path-independence of composites.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, _) in self.index_set.iter().enumerate() {
            if !self.simplices.contains(&Simplex::vertex(i)) {
                problems.push(format!("index {i} has no vertex simplex in the nerve"));
            }
        }
        for s in &self.simplices {
            if s.vertices().iter().any(|&v| v >= self.index_set.len()) {
                problems.push(format!("simplex {s} uses an index outside the index set"));
                continue;
            }
            for (_, face) in s.faces() {
                if !self.simplices.contains(&face) {
                    problems.push(format!("nerve is not closed: {face} missing under {s}"));
                }
            }
            match self.complexes.get(s) {
                None => problems.push(format!("simplex {s} has no assigned complex")),
                Some(c) => {
                    let report = c.validate();
                    if !report.is_valid() {
                        problems.push(format!("piece {s}: {}", report.problems.join("; ")));
                    }
                }
            }
        }
        for s in &self.simplices {
            for (_, face) in s.faces() {
                match self.restrictions.get(&(face.clone(), s.clone())) {
                    None => problems.push(format!("missing restriction {face} -> {s}")),
                    Some(map) => {
                        if let Err(e) = self.check_edge_map(map, &face, s, false) {
                            problems.push(e.to_string());
                        }
                    }
                }
            }
        }
        for ((face, simplex), map) in &self.extensions {
            if let Err(e) = self.check_edge_map(map, face, simplex, true) {
                problems.push(e.to_string());
            }
        }
        if self.has_extensions() {
            for s in &self.simplices {
                for (_, face) in s.faces() {
                    if !self.extensions.contains_key(&(face.clone(), s.clone())) {
                        problems.push(format!("missing extension {s} -> {face}"));
                    }
                }
            }
        }
        if let Some(err) = self.functoriality_violation() {
            problems.push(err.to_string());
        }
        problems
    }

    fn check_edge_map(
        &self,
        map: &ChainMap,
        face: &Simplex,
        simplex: &Simplex,
        is_extension: bool,
    ) -> Result<()> {
        let face_c = self.complex_at(face)?;
        let simplex_c = self.complex_at(simplex)?;
        let (from, to) = if is_extension {
            (simplex_c, face_c)
        } else {
            (face_c, simplex_c)
        };
        let kind = if is_extension {
            "extension"
        } else {
            "restriction"
        };
        if map.source.dims() != from.dims()
            || map.target.dims() != to.dims()
            || map.shift != bd(0, 0)
        {
            return Err(Error::shape(format!(
                "{kind} {face} / {simplex} does not match its endpoint complexes"
            )));
        }
        map.verify()
            .map_err(|e| Error::shape(format!("{kind} {face} / {simplex} is not a chain map: {e}")))
    }

    /// First pair of faces whose two-step restriction composites disagree,
    /// if any. Path independence along all deeper inclusions follows from
    /// the codimension-two case.
    pub fn functoriality_violation(&self) -> Option<Error> {
        for simplex in &self.simplices {
            if simplex.dim() < 2 {
                continue;
            }
            for (_, mid_a) in simplex.faces() {
                for (_, face) in mid_a.faces() {
                    for (_, mid_b) in simplex.faces() {
                        if mid_b <= mid_a || !face.is_face_of(&mid_b) {
                            continue;
                        }
                        let via_a = self
                            .restrictions
                            .get(&(mid_a.clone(), simplex.clone()))?
                            .compose(self.restrictions.get(&(face.clone(), mid_a.clone()))?)
                            .ok()?;
                        let via_b = self
                            .restrictions
                            .get(&(mid_b.clone(), simplex.clone()))?
                            .compose(self.restrictions.get(&(face.clone(), mid_b.clone()))?)
                            .ok()?;
                        if via_a.blocks() != via_b.blocks() {
                            return Some(Error::NonFunctorialRestrictions {
                                face: face.key(),
                                mid_a: mid_a.key(),
                                mid_b: mid_b.key(),
                                simplex: simplex.key(),
                            });
                        }
                    }
                }
            }
        }
        None
    }

    pub fn check(&self) -> Result<()> {
        if let Some(err) = self.functoriality_violation() {
            return Err(err);
        }
        let problems = self.validate();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDiagram {
                name: self.name.clone(),
                problems: problems.join("; "),
            })
        }
    }

    /// Union of the p-coordinates supported by any piece.
    pub fn p_support(&self) -> Vec<i32> {
        let mut ps: Vec<i32> = self
            .complexes
            .values()
            .flat_map(|c| c.support().into_iter().map(|b| b.p))
            .collect();
        ps.sort();
        ps.dedup();
        ps
    }
}

/// The Cech double complex of a diagram in one fixed p-column. Rows are
/// indexed by the Cech degree r, columns by the inner degree s; `delta` is
/// the alternating-sign face sum, `dbar` the componentwise differential
/// with no sign (the sign lives in the total complex).
#[derive(Clone, Debug)]
pub struct CechDoubleComplex {
    pub p: i32,
    pub col_dims: BTreeMap<(usize, i32), usize>,
    pub delta: BTreeMap<(usize, i32), SparseMatrix>,
    pub dbar: BTreeMap<(usize, i32), SparseMatrix>,
    /// Simplices of each Cech degree in the order their summands are stacked.
    pub layout: BTreeMap<usize, Vec<Simplex>>,
}

impl CechDoubleComplex {
    /// Dimension of the (r, s) spot.
    pub fn dim(&self, r: usize, s: i32) -> usize {
        self.col_dims.get(&(r, s)).copied().unwrap_or(0)
    }

    pub fn delta_at(&self, r: usize, s: i32) -> SparseMatrix {
        self.delta
            .get(&(r, s))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::new(self.dim(r + 1, s), self.dim(r, s)))
    }

    pub fn dbar_at(&self, r: usize, s: i32) -> SparseMatrix {
        self.dbar
            .get(&(r, s))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::new(self.dim(r, s + 1), self.dim(r, s)))
    }
}

/// Assemble the double complex of `d` in column `p` and verify the three
/// bicomplex relations on it.
pub fn build_double_complex(d: &CoverDiagram, p: i32) -> Result<CechDoubleComplex> {
    d.check()?;
    let mut layout: BTreeMap<usize, Vec<Simplex>> = BTreeMap::new();
    for r in 0..=d.max_dim() {
        layout.insert(r, d.simplices_of_dim(r).into_iter().cloned().collect());
    }
    let mut col_dims = BTreeMap::new();
    let mut s_values: BTreeSet<i32> = BTreeSet::new();
    for (r, simplices) in &layout {
        for s in simplices {
            for b in d.complex_at(s)?.support() {
                if b.p == p {
                    s_values.insert(b.q);
                    *col_dims.entry((*r, b.q)).or_insert(0) += d.complex_at(s)?.dim_at(b);
                }
            }
        }
    }
    let offsets = |r: usize, s: i32| -> Result<BTreeMap<Simplex, usize>> {
        let mut map = BTreeMap::new();
        let mut offset = 0;
        for simplex in layout.get(&r).into_iter().flatten() {
            map.insert(simplex.clone(), offset);
            offset += d.complex_at(simplex)?.dim_at(bd(p, s));
        }
        Ok(map)
    };
    let mut delta = BTreeMap::new();
    let mut dbar = BTreeMap::new();
    let r_max = d.max_dim();
    let s_lo = s_values.iter().next().copied().unwrap_or(0);
    let s_hi = s_values.iter().last().copied().unwrap_or(0);
    for r in 0..=r_max {
        for s in s_lo..=s_hi {
            let rows_delta = col_dims.get(&(r + 1, s)).copied().unwrap_or(0);
            let cols = col_dims.get(&(r, s)).copied().unwrap_or(0);
            if cols == 0 {
                continue;
            }
            let src_offsets = offsets(r, s)?;
            // componentwise differential
            let rows_dbar = col_dims.get(&(r, s + 1)).copied().unwrap_or(0);
            let mut mb = SparseMatrix::new(rows_dbar, cols);
            let tgt_offsets_dbar = offsets(r, s + 1)?;
            for simplex in layout.get(&r).into_iter().flatten() {
                let block = d.complex_at(simplex)?.diff_at(bd(p, s));
                if !block.is_zero() {
                    mb.insert_block(tgt_offsets_dbar[simplex], src_offsets[simplex], &block);
                }
            }
            if !mb.is_zero() {
                dbar.insert((r, s), mb);
            }
            // alternating face sum
            if rows_delta > 0 {
                let mut md = SparseMatrix::new(rows_delta, cols);
                let tgt_offsets = offsets(r + 1, s)?;
                for simplex in layout.get(&(r + 1)).into_iter().flatten() {
                    for (nu, face) in simplex.faces() {
                        let block = d.restriction(&face, simplex)?.block_at(bd(p, s));
                        if block.is_zero() {
                            continue;
                        }
                        let signed = if nu % 2 == 0 { block } else { block.neg() };
                        let mut placed = SparseMatrix::new(rows_delta, cols);
                        placed.insert_block(tgt_offsets[simplex], src_offsets[&face], &signed);
                        md = md.add(&placed)?;
                    }
                }
                if !md.is_zero() {
                    delta.insert((r, s), md);
                }
            }
        }
    }
    let dc = CechDoubleComplex {
        p,
        col_dims,
        delta,
        dbar,
        layout,
    };
    verify_bicomplex_relations(&dc, &d.name)?;
    Ok(dc)
}

fn verify_bicomplex_relations(dc: &CechDoubleComplex, name: &str) -> Result<()> {
    let spots: Vec<(usize, i32)> = dc.col_dims.keys().copied().collect();
    for &(r, s) in &spots {
        let dd = dc.delta_at(r + 1, s).mul(&dc.delta_at(r, s))?;
        if !dd.is_zero() {
            return Err(Error::InvalidDiagram {
                name: name.to_string(),
                problems: format!("delta o delta is nonzero at Cech degree {r}, inner degree {s}"),
            });
        }
        let bb = dc.dbar_at(r, s + 1).mul(&dc.dbar_at(r, s))?;
        if !bb.is_zero() {
            return Err(Error::InvalidDiagram {
                name: name.to_string(),
                problems: format!("dbar o dbar is nonzero at Cech degree {r}, inner degree {s}"),
            });
        }
        let one = dc.delta_at(r, s + 1).mul(&dc.dbar_at(r, s))?;
        let two = dc.dbar_at(r + 1, s).mul(&dc.delta_at(r, s))?;
        if one != two {
            return Err(Error::InvalidDiagram {
                name: name.to_string(),
                problems: format!(
                    "delta and dbar do not commute at Cech degree {r}, inner degree {s}"
                ),
            });
        }
    }
    Ok(())
}

/// One direct summand of a total-complex space: the component of the
/// r-simplex `simplex` in inner bidegree `inner`, occupying `dim`
/// coordinates starting at `offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub simplex: Simplex,
    pub inner: Bidegree,
    pub offset: usize,
    pub dim: usize,
}

/// A total complex together with the slot layout used to pack and unpack
/// componentwise elements.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub complex: BigradedComplex,
    slots: BTreeMap<Bidegree, Vec<Slot>>,
}

impl TotalComplex {
    pub fn slots_at(&self, at: Bidegree) -> &[Slot] {
        self.slots.get(&at).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn slot(&self, at: Bidegree, simplex: &Simplex) -> Option<&Slot> {
        self.slots_at(at).iter().find(|s| &s.simplex == simplex)
    }

    /// Flatten a componentwise element into total coordinates. Components
    /// must match their slot dimensions; missing components are zero.
    pub fn pack(&self, x: &CechElement) -> Result<Vec<Scalar>> {
        let at = bd(x.p, x.q);
        let mut v = vec![Scalar::zero(); self.complex.dim_at(at)];
        for (simplex, component) in &x.components {
            let Some(slot) = self.slot(at, simplex) else {
                if component.iter().all(Scalar::is_zero) {
                    continue;
                }
                return Err(Error::ElementShape {
                    at,
                    got: component.len(),
                    want: 0,
                });
            };
            if component.len() != slot.dim {
                return Err(Error::ElementShape {
                    at,
                    got: component.len(),
                    want: slot.dim,
                });
            }
            for (k, value) in component.iter().enumerate() {
                v[slot.offset + k] = value.clone();
            }
        }
        Ok(v)
    }

    pub fn unpack(&self, at: Bidegree, v: &[Scalar]) -> Result<CechElement> {
        if v.len() != self.complex.dim_at(at) {
            return Err(Error::ElementShape {
                at,
                got: v.len(),
                want: self.complex.dim_at(at),
            });
        }
        let mut components = BTreeMap::new();
        for slot in self.slots_at(at) {
            components.insert(
                slot.simplex.clone(),
                v[slot.offset..slot.offset + slot.dim].to_vec(),
            );
        }
        Ok(CechElement {
            p: at.p,
            q: at.q,
            components,
        })
    }
}

/// An element of a total-complex space, kept componentwise: the component
/// on an r-simplex of a degree-(p, q) element has inner bidegree
/// (p, q - r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechElement {
    pub p: i32,
    pub q: i32,
    pub components: BTreeMap<Simplex, Vec<Scalar>>,
}

/// Total complex over every supported p at once. Spaces in total degree
/// (p, q) are ordered by Cech degree r, then simplex, then basis index,
/// and the differential is `delta + (-1)^r dbar`.
pub fn total_complex_full(d: &CoverDiagram) -> Result<TotalComplex> {
    d.check()?;
    build_total_unchecked(d)
}

fn build_total_unchecked(d: &CoverDiagram) -> Result<TotalComplex> {
    let mut complex = BigradedComplex::new(format!("tot({})", d.name));
    let mut slots: BTreeMap<Bidegree, Vec<Slot>> = BTreeMap::new();
    let r_max = d.max_dim();
    let mut totals: BTreeSet<Bidegree> = BTreeSet::new();
    for r in 0..=r_max {
        for simplex in d.simplices_of_dim(r) {
            for inner in d.complex_at(simplex)?.support() {
                totals.insert(bd(inner.p, inner.q + r as i32));
            }
        }
    }
    for &at in &totals {
        let mut list = Vec::new();
        let mut offset = 0;
        for r in 0..=r_max {
            let inner = bd(at.p, at.q - r as i32);
            for simplex in d.simplices_of_dim(r) {
                let dim = d.complex_at(simplex)?.dim_at(inner);
                if dim == 0 {
                    continue;
                }
                list.push(Slot {
                    simplex: simplex.clone(),
                    inner,
                    offset,
                    dim,
                });
                offset += dim;
            }
        }
        complex.set_dim(at, offset);
        slots.insert(at, list);
    }
    let all_at: Vec<Bidegree> = slots.keys().copied().collect();
    for &at in &all_at {
        let rows = complex.dim_at(at.up_q());
        let cols = complex.dim_at(at);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = SparseMatrix::new(rows, cols);
        let empty = Vec::new();
        let target_slots = slots.get(&at.up_q()).unwrap_or(&empty);
        for src in slots.get(&at).unwrap_or(&empty) {
            let r = src.simplex.dim();
            // componentwise differential with the Cech-degree sign
            if let Some(tgt) = target_slots
                .iter()
                .find(|t| t.simplex == src.simplex && t.inner == src.inner.up_q())
            {
                let block = d.complex_at(&src.simplex)?.diff_at(src.inner);
                if !block.is_zero() {
                    let signed = if r % 2 == 0 { block } else { block.neg() };
                    m.insert_block(tgt.offset, src.offset, &signed);
                }
            }
            // alternating face sum into each cofacet
            for tgt in target_slots.iter() {
                if tgt.simplex.dim() != r + 1 || !src.simplex.is_face_of(&tgt.simplex) {
                    continue;
                }
                let nu = tgt
                    .simplex
                    .vertices()
                    .iter()
                    .position(|v| !src.simplex.vertices().contains(v))
                    .expect("codimension-one inclusion");
                let block = d
                    .restriction(&src.simplex, &tgt.simplex)?
                    .block_at(src.inner);
                if block.is_zero() {
                    continue;
                }
                let signed = if nu % 2 == 0 { block } else { block.neg() };
                let mut placed = SparseMatrix::new(rows, cols);
                placed.insert_block(tgt.offset, src.offset, &signed);
                m = m.add(&placed)?;
            }
        }
        complex.set_diff(at, m)?;
    }
    let report = complex.validate();
    if !report.is_valid() {
        return Err(Error::InvalidDiagram {
            name: d.name.clone(),
            problems: format!("total complex: {}", report.problems.join("; ")),
        });
    }
    Ok(TotalComplex { complex, slots })
}

/// Total complex of one p-column, sliced out of the full assembly so both
/// agree entry for entry.
pub fn total_complex(d: &CoverDiagram, p: i32) -> Result<TotalComplex> {
    let full = total_complex_full(d)?;
    let mut complex = BigradedComplex::new(format!("tot({}, p={})", d.name, p));
    let mut slots = BTreeMap::new();
    for at in full.complex.support() {
        if at.p != p {
            continue;
        }
        complex.set_dim(at, full.complex.dim_at(at));
        slots.insert(at, full.slots_at(at).to_vec());
    }
    for at in complex.support() {
        complex.set_diff(at, full.complex.diff_at(at))?;
    }
    Ok(TotalComplex { complex, slots })
}

/// Cech cohomology of the cover in one bidegree: cohomology of the total
/// complex.
pub fn cech_cohomology(d: &CoverDiagram, p: i32, q: i32) -> Result<CohomologyGroup> {
    let total = total_complex_full(d)?;
    total.complex.cohomology(bd(p, q))
}

/// The relative complex of a two-set cover with the `omit` piece removed:
/// spaces `C1(p, q) + C01(p, q-1)`, differential
/// `(x1, x01) -> (d x1, restrict(x1) - d x01)`.
#[derive(Clone, Debug)]
pub struct RelativeComplex {
    pub complex: BigradedComplex,
    pub omitted: Simplex,
    pub kept: Simplex,
    pub overlap: Simplex,
    kept_dims: BTreeMap<Bidegree, usize>,
}

impl RelativeComplex {
    /// Sizes of the two blocks of the space at `at`: the kept piece at
    /// `at` and the overlap at `at - (0,1)`.
    pub fn block_dims(&self, at: Bidegree) -> (usize, usize) {
        let kept = self.kept_dims.get(&at).copied().unwrap_or(0);
        (kept, self.complex.dim_at(at) - kept)
    }
}

pub fn relative_complex(d: &CoverDiagram, omit_label: &str) -> Result<RelativeComplex> {
    d.check()?;
    let (omitted, kept, overlap) = d.two_set_split(omit_label)?;
    let kept_c = d.complex_at(&kept)?.clone();
    let overlap_c = d.complex_at(&overlap)?.clone();
    let restrict = d.restriction(&kept, &overlap)?.clone();
    let mut complex = BigradedComplex::new(format!("rel({} minus {})", d.name, omit_label));
    let mut support: Vec<Bidegree> = kept_c.support();
    support.extend(overlap_c.support().iter().map(|&b| b.up_q()));
    support.sort();
    support.dedup();
    let mut kept_dims = BTreeMap::new();
    for &at in &support {
        let k = kept_c.dim_at(at);
        let o = overlap_c.dim_at(at.down_q());
        complex.set_dim(at, k + o);
        kept_dims.insert(at, k);
    }
    for &at in &support {
        let rows = complex.dim_at(at.up_q());
        let cols = complex.dim_at(at);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = SparseMatrix::new(rows, cols);
        m.insert_block(0, 0, &kept_c.diff_at(at));
        m.insert_block(kept_c.dim_at(at.up_q()), 0, &restrict.block_at(at));
        m.insert_block(
            kept_c.dim_at(at.up_q()),
            kept_c.dim_at(at),
            &overlap_c.diff_at(at.down_q()).neg(),
        );
        complex.set_diff(at, m)?;
    }
    complex
        .validate()
        .into_result(&complex.name.clone())
        .map_err(|e| Error::InvalidDiagram {
            name: d.name.clone(),
            problems: e.to_string(),
        })?;
    Ok(RelativeComplex {
        complex,
        omitted,
        kept,
        overlap,
        kept_dims,
    })
}

/// The identification of the relative complex with the mapping cone of
/// the overlap restriction, as an explicit invertible map of q-shift -1
/// (it anticommutes with the differentials, which is exactly the chain
/// condition for that shift). Blocks swap the two components and negate
/// the overlap part.
pub fn relative_vs_cone_iso(d: &CoverDiagram, omit_label: &str) -> Result<ChainMap> {
    let rel = relative_complex(d, omit_label)?;
    let (_, kept, overlap) = d.two_set_split(omit_label)?;
    let restrict = d.restriction(&kept, &overlap)?.clone();
    let cone = crate::bicomplex::cone(&restrict)?;
    let mut iso = ChainMap::new(rel.complex.clone(), cone.clone(), bd(0, -1));
    for &at in &rel.complex.support() {
        let (kept_dim, overlap_dim) = rel.block_dims(at);
        let rows = cone.dim_at(at.down_q());
        let mut m = SparseMatrix::new(rows, kept_dim + overlap_dim);
        // cone space at (p, q-1) is overlap(p, q-1) then kept(p, q)
        m.insert_block(0, kept_dim, &SparseMatrix::identity(overlap_dim).neg());
        m.insert_block(overlap_dim, 0, &SparseMatrix::identity(kept_dim));
        iso.set_block(at, m)?;
    }
    iso.verify()?;
    Ok(iso)
}

/// Short exact sequence of the pair: relative complex into the total
/// complex, total complex onto the omitted piece. Exactness is verified
/// levelwise by rank.
pub fn ses_of_pair(d: &CoverDiagram, omit_label: &str) -> Result<ShortExactSequence> {
    let rel = relative_complex(d, omit_label)?;
    let total = total_complex_full(d)?;
    let (omitted, kept, overlap) = d.two_set_split(omit_label)?;
    let quot = d.complex_at(&omitted)?.clone();

    let mut incl = ChainMap::new(rel.complex.clone(), total.complex.clone(), bd(0, 0));
    for &at in &rel.complex.support() {
        let (kept_dim, overlap_dim) = rel.block_dims(at);
        let rows = total.complex.dim_at(at);
        let mut m = SparseMatrix::new(rows, kept_dim + overlap_dim);
        if let Some(slot) = total.slot(at, &kept) {
            m.insert_block(slot.offset, 0, &SparseMatrix::identity(kept_dim));
        }
        if let Some(slot) = total.slot(at, &overlap) {
            m.insert_block(slot.offset, kept_dim, &SparseMatrix::identity(overlap_dim));
        }
        incl.set_block(at, m)?;
    }

    let mut proj = ChainMap::new(total.complex.clone(), quot.clone(), bd(0, 0));
    for &at in &total.complex.support() {
        let rows = quot.dim_at(at);
        let mut m = SparseMatrix::new(rows, total.complex.dim_at(at));
        if let Some(slot) = total.slot(at, &omitted) {
            let mut id = SparseMatrix::new(rows, total.complex.dim_at(at));
            for k in 0..slot.dim {
                id.set(k, slot.offset + k, Scalar::one());
            }
            m = m.add(&id)?;
        }
        proj.set_block(at, m)?;
    }

    let ses = ShortExactSequence {
        sub: rel.complex,
        mid: total.complex,
        quot,
        incl,
        proj,
    };
    ses.verify()?;
    Ok(ses)
}

/// Assemble the comparison map from a global complex into the total
/// complex of a cover: restrict onto each vertex piece, zero on higher
/// overlaps. `to_pieces` maps each vertex simplex to the restriction from
/// `global` onto that piece. The result is verified to be a chain map,
/// which is exactly compatibility of the given restrictions with the
/// diagram's own.
pub fn canonical_map(
    d: &CoverDiagram,
    global: &BigradedComplex,
    to_pieces: &BTreeMap<Simplex, ChainMap>,
) -> Result<ChainMap> {
    let total = total_complex_full(d)?;
    let mut map = ChainMap::new(global.clone(), total.complex.clone(), bd(0, 0));
    for &at in &global.support() {
        let rows = total.complex.dim_at(at);
        let mut m = SparseMatrix::new(rows, global.dim_at(at));
        for vertex in d.simplices_of_dim(0) {
            let piece_map = to_pieces.get(vertex).ok_or_else(|| Error::NoSuchPiece {
                name: d.name.clone(),
                label: format!("global restriction onto {vertex}"),
            })?;
            if let Some(slot) = total.slot(at, vertex) {
                m.insert_block(slot.offset, 0, &piece_map.block_at(at));
            }
        }
        map.set_block(at, m)?;
    }
    map.verify()?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(name: &str) -> BigradedComplex {
        let mut c = BigradedComplex::new(name);
        for at in [bd(0, 0), bd(1, 0), bd(0, 1), bd(1, 1)] {
            c.set_dim(at, 1);
        }
        c
    }

    fn interval(name: &str) -> BigradedComplex {
        let mut c = BigradedComplex::new(name);
        c.set_dim(bd(0, 0), 1);
        c.set_dim(bd(0, 1), 1);
        c.set_diff(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        c
    }

    /// Two-set cover of a complex by itself: identity restrictions and
    /// extensions everywhere.
    fn self_cover(c: &BigradedComplex) -> CoverDiagram {
        let mut d = CoverDiagram::new(
            format!("selfcover({})", c.name),
            vec!["U0".into(), "U1".into()],
        );
        let v0 = Simplex::vertex(0);
        let v1 = Simplex::vertex(1);
        let overlap = Simplex::new(vec![0, 1]);
        for s in [&v0, &v1, &overlap] {
            d.set_piece(s.clone(), c.clone());
        }
        for v in [&v0, &v1] {
            d.set_restriction(v.clone(), overlap.clone(), ChainMap::identity(c));
            d.set_extension(v.clone(), overlap.clone(), ChainMap::identity(c));
        }
        d
    }

    fn one_set_cover(c: &BigradedComplex) -> CoverDiagram {
        let mut d = CoverDiagram::new("single", vec!["U0".into()]);
        d.set_piece(Simplex::vertex(0), c.clone());
        d
    }

    #[test]
    fn one_set_total_complex_is_the_piece() {
        let c = unit_square("piece");
        let total = total_complex_full(&one_set_cover(&c)).unwrap();
        assert_eq!(total.complex.dims(), c.dims());
        for at in c.support() {
            assert_eq!(total.complex.diff_at(at), c.diff_at(at));
        }
    }

    #[test]
    fn two_set_total_differential_has_the_documented_shape() {
        // all piece differentials vanish, so the only differential left is
        // (x0, x1) -> x1 - x0 into the overlap slot
        let c = unit_square("sq");
        let d = self_cover(&c);
        let total = total_complex_full(&d).unwrap();
        assert_eq!(total.complex.dim_at(bd(0, 0)), 2);
        assert_eq!(total.complex.dim_at(bd(0, 1)), 3);
        let m = total.complex.diff_at(bd(0, 0));
        let expected = SparseMatrix::from_triples(
            3,
            2,
            vec![(2, 0, Scalar::from_int(-1)), (2, 1, Scalar::one())],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn zero_restrictions_decouple_the_columns() {
        let mut c = BigradedComplex::new("dot");
        c.set_dim(bd(0, 0), 1);
        let mut d = self_cover(&c);
        let overlap = Simplex::new(vec![0, 1]);
        for v in [Simplex::vertex(0), Simplex::vertex(1)] {
            d.set_restriction(v.clone(), overlap.clone(), ChainMap::zero(&c, &c, bd(0, 0)));
            d.set_extension(v.clone(), overlap.clone(), ChainMap::zero(&c, &c, bd(0, 0)));
        }
        let dc = build_double_complex(&d, 0).unwrap();
        assert!(dc.delta_at(0, 0).is_zero());
        assert_eq!(dc.dim(0, 0), 2);
        assert_eq!(dc.dim(1, 0), 1);
        // decoupled pieces sum, the overlap copy lands one degree up
        let h00 = cech_cohomology(&d, 0, 0).unwrap();
        assert_eq!(h00.dim, 2);
        let h01 = cech_cohomology(&d, 0, 1).unwrap();
        assert_eq!(h01.dim, 1);
    }

    #[test]
    fn self_cover_cohomology_matches_the_global_complex() {
        let c = unit_square("sq");
        let d = self_cover(&c);
        for p in 0..2 {
            for q in 0..3 {
                let expected = c.cohomology(bd(p, q)).unwrap().dim;
                assert_eq!(
                    cech_cohomology(&d, p, q).unwrap().dim,
                    expected,
                    "({p},{q})"
                );
            }
        }
    }

    #[test]
    fn canonical_map_is_iso_for_self_cover() {
        let c = unit_square("sq");
        let d = self_cover(&c);
        let mut to_pieces = BTreeMap::new();
        for v in [Simplex::vertex(0), Simplex::vertex(1)] {
            to_pieces.insert(v, ChainMap::identity(&c));
        }
        let map = canonical_map(&d, &c, &to_pieces).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                assert!(map.is_iso_on_cohomology(bd(p, q)).unwrap(), "({p},{q})");
            }
        }
    }

    #[test]
    fn relative_complex_of_empty_kept_piece_is_shifted_overlap() {
        let iv = interval("iv");
        let empty = BigradedComplex::new("empty");
        let mut d = CoverDiagram::new("halfempty", vec!["U0".into(), "U1".into()]);
        d.set_piece(Simplex::vertex(0), iv.clone());
        d.set_piece(Simplex::vertex(1), empty.clone());
        let overlap = Simplex::new(vec![0, 1]);
        d.set_piece(overlap.clone(), iv.clone());
        d.set_restriction(Simplex::vertex(0), overlap.clone(), ChainMap::identity(&iv));
        d.set_restriction(
            Simplex::vertex(1),
            overlap.clone(),
            ChainMap::zero(&empty, &iv, bd(0, 0)),
        );
        let rel = relative_complex(&d, "U0").unwrap();
        assert_eq!(rel.complex.dim_at(bd(0, 1)), 1);
        assert_eq!(rel.complex.dim_at(bd(0, 2)), 1);
        // differential is the negated overlap differential, shifted up
        assert_eq!(
            rel.complex.diff_at(bd(0, 1)),
            SparseMatrix::identity(1).neg()
        );
    }

    #[test]
    fn relative_complex_matches_cone_up_to_the_shift() {
        let c = unit_square("sq");
        let d = self_cover(&c);
        let iso = relative_vs_cone_iso(&d, "U0").unwrap();
        for &at in &iso.source.support() {
            let block = iso.block_at(at);
            assert_eq!(block.rows(), block.cols());
            assert_eq!(block.rank(), block.rows(), "not invertible at {at}");
            assert_eq!(
                iso.source.cohomology(at).unwrap().dim,
                iso.target.cohomology(at.down_q()).unwrap().dim
            );
        }
    }

    #[test]
    fn ses_of_pair_verifies_on_a_self_cover() {
        let c = unit_square("sq");
        let d = self_cover(&c);
        let ses = ses_of_pair(&d, "U0").unwrap();
        assert_eq!(ses.quot.dims(), c.dims());
    }

    #[test]
    fn nerve_must_be_closed() {
        let c = interval("iv");
        let mut d = CoverDiagram::new("open", vec!["U0".into(), "U1".into()]);
        d.set_piece(Simplex::vertex(0), c.clone());
        d.set_piece(Simplex::new(vec![0, 1]), c.clone());
        let problems = d.validate();
        assert!(problems.iter().any(|p| p.contains("vertex simplex")));
        assert!(problems.iter().any(|p| p.contains("missing restriction")));
    }

    #[test]
    fn functoriality_violation_names_the_pair() {
        // three-set cover, every piece one-dimensional at (0,0); one scaled
        // edge restriction breaks path independence into the triple overlap
        let mut point = BigradedComplex::new("pt");
        point.set_dim(bd(0, 0), 1);
        let mut d = CoverDiagram::new("threeset", vec!["A".into(), "B".into(), "C".into()]);
        let mut simplices = Vec::new();
        for v in 0..3 {
            simplices.push(Simplex::vertex(v));
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            simplices.push(Simplex::new(pair));
        }
        simplices.push(Simplex::new(vec![0, 1, 2]));
        for s in &simplices {
            d.set_piece(s.clone(), point.clone());
        }
        for s in &simplices {
            for (_, face) in s.faces() {
                d.set_restriction(face, s.clone(), ChainMap::identity(&point));
            }
        }
        let mut scaled = ChainMap::new(point.clone(), point.clone(), bd(0, 0));
        scaled
            .set_block(
                bd(0, 0),
                SparseMatrix::identity(1).scale(&Scalar::from_int(2)),
            )
            .unwrap();
        d.set_restriction(Simplex::vertex(0), Simplex::new(vec![0, 1]), scaled);
        match d.functoriality_violation() {
            Some(Error::NonFunctorialRestrictions { face, simplex, .. }) => {
                assert_eq!(face, "0");
                assert_eq!(simplex, "0.1.2");
            }
            other => panic!("expected a functoriality violation, got {other:?}"),
        }
        assert!(build_double_complex(&d, 0).is_err());
    }

    #[test]
    fn three_set_bicomplex_relations_hold() {
        let mut point = BigradedComplex::new("pt");
        point.set_dim(bd(0, 0), 1);
        point.set_dim(bd(0, 1), 1);
        point.set_diff(bd(0, 0), SparseMatrix::identity(1)).unwrap();
        let mut d = CoverDiagram::new("threeset", vec!["A".into(), "B".into(), "C".into()]);
        let mut simplices = Vec::new();
        for v in 0..3 {
            simplices.push(Simplex::vertex(v));
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            simplices.push(Simplex::new(pair));
        }
        simplices.push(Simplex::new(vec![0, 1, 2]));
        for s in &simplices {
            d.set_piece(s.clone(), point.clone());
        }
        for s in &simplices {
            for (_, face) in s.faces() {
                d.set_restriction(face, s.clone(), ChainMap::identity(&point));
            }
        }
        let dc = build_double_complex(&d, 0).unwrap();
        assert_eq!(dc.dim(0, 0), 3);
        assert_eq!(dc.dim(1, 0), 3);
        assert_eq!(dc.dim(2, 0), 1);
        // nerve of a triple intersection is contractible: H matches a point
        assert_eq!(cech_cohomology(&d, 0, 0).unwrap().dim, 0);
        assert_eq!(cech_cohomology(&d, 0, 1).unwrap().dim, 0);
        assert_eq!(cech_cohomology(&d, 0, 2).unwrap().dim, 0);
    }

    #[test]
    fn pack_unpack_round_trip() {
        let c = unit_square("sq");
        let d = self_cover(&c);
        let total = total_complex_full(&d).unwrap();
        let mut components = BTreeMap::new();
        components.insert(Simplex::vertex(0), vec![Scalar::from_int(2)]);
        components.insert(Simplex::vertex(1), vec![Scalar::from_int(3)]);
        components.insert(Simplex::new(vec![0, 1]), vec![Scalar::i()]);
        let x = CechElement {
            p: 0,
            q: 1,
            components,
        };
        let packed = total.pack(&x).unwrap();
        assert_eq!(packed.len(), 3);
        let back = total.unpack(bd(0, 1), &packed).unwrap();
        assert_eq!(back, x);
    }
}
