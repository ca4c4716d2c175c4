//! Concrete models: multiplicative structures, the torus family, sheeted
//! covers, seeded random diagrams and morphisms, and synthetic blow-up
//! bundles with known quotient profiles.
//!
//! Random objects are assembled from labeled atoms (one-dimensional
//! classes and acyclic intervals), wired together by per-atom rules, and
//! then conjugated by random invertible basis changes in every bidegree.
//! Every structural identity (chain maps, commuting squares,
//! functoriality) holds by construction, while the matrices look generic.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bicomplex::{bd, Bidegree, BigradedComplex, ChainMap};
use crate::cover::{total_complex_full, CechElement, CoverDiagram, Simplex};
use crate::duality::PairingData;
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::morphism::{CoverMorphism, MorphismPairings};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------
// multiplicative models

/// A finite bigraded model with a wedge product: complex, product tables,
/// unit, optionally a top-degree integral and a two-piece partition of
/// unity. Products are stored per bidegree pair as one matrix for each
/// left-hand basis element.
#[derive(Clone, Debug)]
pub struct DgaModel {
    pub name: String,
    pub complex: BigradedComplex,
    pub n: i32,
    wedge: BTreeMap<(Bidegree, Bidegree), Vec<SparseMatrix>>,
    pub unit: Vec<Scalar>,
    pub integrate: Option<Vec<Scalar>>,
    pub partition: Option<(Vec<Scalar>, Vec<Scalar>)>,
}

impl DgaModel {
    pub fn new(
        name: impl Into<String>,
        complex: BigradedComplex,
        n: i32,
        unit: Vec<Scalar>,
    ) -> Self {
        DgaModel {
            name: name.into(),
            complex,
            n,
            wedge: BTreeMap::new(),
            unit,
            integrate: None,
            partition: None,
        }
    }

    pub fn set_wedge(&mut self, a: Bidegree, b: Bidegree, tables: Vec<SparseMatrix>) -> Result<()> {
        let out = a + b;
        if tables.len() != self.complex.dim_at(a) {
            return Err(Error::shape(format!(
                "wedge table for {a} x {b} needs one matrix per left basis element"
            )));
        }
        for m in &tables {
            if m.rows() != self.complex.dim_at(out) || m.cols() != self.complex.dim_at(b) {
                return Err(Error::shape(format!(
                    "wedge table entry for {a} x {b} has the wrong shape"
                )));
            }
        }
        if tables.iter().all(SparseMatrix::is_zero) {
            self.wedge.remove(&(a, b));
        } else {
            self.wedge.insert((a, b), tables);
        }
        Ok(())
    }

    pub fn wedge_tables(
        &self,
    ) -> impl Iterator<Item = (&(Bidegree, Bidegree), &Vec<SparseMatrix>)> {
        self.wedge.iter()
    }

    /// Product of two coordinate vectors; absent tables mean the product
    /// is zero.
    pub fn wedge(
        &self,
        a: Bidegree,
        x: &[Scalar],
        b: Bidegree,
        y: &[Scalar],
    ) -> Result<Vec<Scalar>> {
        if x.len() != self.complex.dim_at(a) {
            return Err(Error::ElementShape {
                at: a,
                got: x.len(),
                want: self.complex.dim_at(a),
            });
        }
        if y.len() != self.complex.dim_at(b) {
            return Err(Error::ElementShape {
                at: b,
                got: y.len(),
                want: self.complex.dim_at(b),
            });
        }
        let out_dim = self.complex.dim_at(a + b);
        let mut acc = vec![Scalar::zero(); out_dim];
        let Some(tables) = self.wedge.get(&(a, b)) else {
            return Ok(acc);
        };
        for (j, coeff) in x.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let part = tables[j].mul_vec(y)?;
            for (slot, v) in acc.iter_mut().zip(part) {
                *slot += &(coeff * &v);
            }
        }
        Ok(acc)
    }

    pub fn integrate(&self, top: &[Scalar]) -> Result<Scalar> {
        let Some(functional) = &self.integrate else {
            return Err(Error::InvalidModel {
                name: self.name.clone(),
                problems: "no integration functional".into(),
            });
        };
        if top.len() != functional.len() {
            return Err(Error::ElementShape {
                at: bd(self.n, self.n),
                got: top.len(),
                want: functional.len(),
            });
        }
        let mut acc = Scalar::zero();
        for (f, t) in functional.iter().zip(top) {
            acc += &(f * t);
        }
        Ok(acc)
    }

    fn basis(&self, at: Bidegree) -> Vec<Vec<Scalar>> {
        let dim = self.complex.dim_at(at);
        (0..dim)
            .map(|k| {
                let mut v = vec![Scalar::zero(); dim];
                v[k] = Scalar::one();
                v
            })
            .collect()
    }

    /// Every violation of the model axioms: invalid complex, support
    /// outside the square, broken unit laws, graded commutativity or
    /// Leibniz failures, non-closed integral, or a partition that does
    /// not sum to the unit.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let report = self.complex.validate();
        if !report.is_valid() {
            problems.push(report.problems.join("; "));
        }
        for at in self.complex.support() {
            if at.p < 0 || at.q < 0 || at.p > self.n || at.q > self.n {
                problems.push(format!(
                    "support at {at} is outside the [0,{}] square",
                    self.n
                ));
            }
        }
        if self.unit.len() != self.complex.dim_at(bd(0, 0)) {
            problems.push("unit has the wrong length".into());
            return problems;
        }
        let support = self.complex.support();
        for &at in &support {
            for (k, e) in self.basis(at).iter().enumerate() {
                match self.wedge(bd(0, 0), &self.unit, at, e) {
                    Ok(v) if &v == e => {}
                    _ => problems.push(format!("left unit law fails on basis {k} at {at}")),
                }
                match self.wedge(at, e, bd(0, 0), &self.unit) {
                    Ok(v) if &v == e => {}
                    _ => problems.push(format!("right unit law fails on basis {k} at {at}")),
                }
            }
        }
        for &a in &support {
            for &b in &support {
                let sign = if ((a.p + a.q) * (b.p + b.q)).rem_euclid(2) == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                for (j, x) in self.basis(a).iter().enumerate() {
                    for (k, y) in self.basis(b).iter().enumerate() {
                        let xy = match self.wedge(a, x, b, y) {
                            Ok(v) => v,
                            Err(e) => {
                                problems.push(format!("wedge fails at {a} x {b}: {e}"));
                                continue;
                            }
                        };
                        let yx = self.wedge(b, y, a, x).unwrap_or_default();
                        let flipped: Vec<Scalar> = yx.iter().map(|v| &sign * v).collect();
                        if xy != flipped {
                            problems.push(format!(
                                "graded commutativity fails for basis {j} at {a} against basis {k} at {b}"
                            ));
                        }
                        // Leibniz: d(xy) = dx y + (-1)^(p+q) x dy
                        let d_xy = match self.complex.diff_at(a + b).mul_vec(&xy) {
                            Ok(v) => v,
                            Err(_) => continue,
                        };
                        let dx = self.complex.diff_at(a).mul_vec(x).unwrap_or_default();
                        let dy = self.complex.diff_at(b).mul_vec(y).unwrap_or_default();
                        let left = self.wedge(a.up_q(), &dx, b, y).unwrap_or_default();
                        let right = self.wedge(a, x, b.up_q(), &dy).unwrap_or_default();
                        let koszul = if (a.p + a.q).rem_euclid(2) == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        };
                        let mut rhs = left;
                        for (slot, v) in rhs.iter_mut().zip(right) {
                            *slot += &(&koszul * &v);
                        }
                        if d_xy != rhs {
                            problems.push(format!(
                                "Leibniz fails for basis {j} at {a} against basis {k} at {b}"
                            ));
                        }
                    }
                }
            }
        }
        if let Some(functional) = &self.integrate {
            if functional.len() != self.complex.dim_at(bd(self.n, self.n)) {
                problems.push("integration functional has the wrong length".into());
            } else {
                let below = bd(self.n, self.n - 1);
                let d = self.complex.diff_at(below);
                for (k, e) in self.basis(below).iter().enumerate() {
                    let img = d.mul_vec(e).unwrap_or_default();
                    let mut acc = Scalar::zero();
                    for (f, t) in functional.iter().zip(&img) {
                        acc += &(f * t);
                    }
                    if !acc.is_zero() {
                        problems.push(format!(
                            "integral of the differential of basis {k} at {below} is nonzero"
                        ));
                    }
                }
            }
        }
        if let Some((rho0, rho1)) = &self.partition {
            let dim = self.complex.dim_at(bd(0, 0));
            if rho0.len() != dim || rho1.len() != dim {
                problems.push("partition pieces have the wrong length".into());
            } else {
                let sum: Vec<Scalar> = rho0.iter().zip(rho1).map(|(a, b)| a + b).collect();
                if sum != self.unit {
                    problems.push("partition does not sum to the unit".into());
                }
            }
        }
        problems
    }

    pub fn check(&self) -> Result<()> {
        let problems = self.validate();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel {
                name: self.name.clone(),
                problems: problems.join("; "),
            })
        }
    }

    /// Associativity of the product on every basis triple. Separate from
    /// `validate` because it is cubic in the support.
    pub fn check_associativity(&self) -> Result<()> {
        let support = self.complex.support();
        for &a in &support {
            for &b in &support {
                for &c in &support {
                    for x in self.basis(a) {
                        for y in self.basis(b) {
                            for z in self.basis(c) {
                                let xy = self.wedge(a, &x, b, &y)?;
                                let left = self.wedge(a + b, &xy, c, &z)?;
                                let yz = self.wedge(b, &y, c, &z)?;
                                let right = self.wedge(a, &x, b + c, &yz)?;
                                if left != right {
                                    return Err(Error::InvalidModel {
                                        name: self.name.clone(),
                                        problems: format!("associativity fails on {a} x {b} x {c}"),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The wedge-and-integrate pairing of the model, verified.
    pub fn pairing_data(&self) -> Result<PairingData> {
        self.check()?;
        if self.integrate.is_none() {
            return Err(Error::InvalidModel {
                name: self.name.clone(),
                problems: "pairing data needs an integration functional".into(),
            });
        }
        let mut pd = PairingData::new(self.complex.clone(), self.n, self.unit.clone())?;
        for p in 0..=self.n {
            for q in 0..=self.n {
                let at = bd(p, q);
                let partner = bd(self.n - p, self.n - q);
                let mut block =
                    SparseMatrix::new(self.complex.dim_at(at), self.complex.dim_at(partner));
                for (j, x) in self.basis(at).iter().enumerate() {
                    for (k, y) in self.basis(partner).iter().enumerate() {
                        let v = self.integrate(&self.wedge(at, x, partner, y)?)?;
                        if !v.is_zero() {
                            block.set(j, k, v);
                        }
                    }
                }
                pd.set_block(at, block)?;
            }
        }
        pd.verify()?;
        Ok(pd)
    }

    /// The two-set cover of the model by itself: identity restrictions
    /// and extensions on every simplex.
    pub fn self_cover(&self) -> CoverDiagram {
        let mut d = CoverDiagram::new(
            format!("cover({})", self.name),
            vec!["U0".into(), "U1".into()],
        );
        let overlap = Simplex::new(vec![0, 1]);
        for s in [Simplex::vertex(0), Simplex::vertex(1), overlap.clone()] {
            d.set_piece(s, self.complex.clone());
        }
        for v in [Simplex::vertex(0), Simplex::vertex(1)] {
            d.set_restriction(
                v.clone(),
                overlap.clone(),
                ChainMap::identity(&self.complex),
            );
            d.set_extension(v, overlap.clone(), ChainMap::identity(&self.complex));
        }
        d
    }

    pub fn self_cover_pairings(&self) -> Result<BTreeMap<Simplex, PairingData>> {
        let pd = self.pairing_data()?;
        let mut out = BTreeMap::new();
        for s in [
            Simplex::vertex(0),
            Simplex::vertex(1),
            Simplex::new(vec![0, 1]),
        ] {
            out.insert(s, pd.clone());
        }
        Ok(out)
    }
}

/// Glue a closed two-set cochain into one global form using the model's
/// partition of unity:
/// `rho0 ^ x0 + rho1 ^ x1 - (d rho0) ^ x01`.
/// The input must be closed in the total complex of the self cover and
/// the output is checked to be closed in the model.
pub fn glue_global(m: &DgaModel, x: &CechElement) -> Result<Vec<Scalar>> {
    let Some((rho0, rho1)) = &m.partition else {
        return Err(Error::MissingPartition {
            name: m.name.clone(),
        });
    };
    m.check()?;
    let d = m.self_cover();
    let total = total_complex_full(&d)?;
    let at = bd(x.p, x.q);
    let packed = total.pack(x)?;
    let image = total.complex.diff_at(at).mul_vec(&packed)?;
    if image.iter().any(|v| !v.is_zero()) {
        return Err(Error::GlueInputNotClosed);
    }
    let zero0 = vec![Scalar::zero(); m.complex.dim_at(at)];
    let zero01 = vec![Scalar::zero(); m.complex.dim_at(at.down_q())];
    let xi0 = x.components.get(&Simplex::vertex(0)).unwrap_or(&zero0);
    let xi1 = x.components.get(&Simplex::vertex(1)).unwrap_or(&zero0);
    let xi01 = x
        .components
        .get(&Simplex::new(vec![0, 1]))
        .unwrap_or(&zero01);
    let part0 = m.wedge(bd(0, 0), rho0, at, xi0)?;
    let part1 = m.wedge(bd(0, 0), rho1, at, xi1)?;
    let d_rho0 = m.complex.diff_at(bd(0, 0)).mul_vec(rho0)?;
    let correction = m.wedge(bd(0, 1), &d_rho0, at.down_q(), xi01)?;
    let mut glued = part0;
    for (slot, v) in glued.iter_mut().zip(part1) {
        *slot += &v;
    }
    for (slot, v) in glued.iter_mut().zip(correction) {
        *slot -= &v;
    }
    let d_out = m.complex.diff_at(at).mul_vec(&glued)?;
    if d_out.iter().any(|v| !v.is_zero()) {
        return Err(Error::GlueOutputNotClosed);
    }
    Ok(glued)
}

/// A two-generator nilpotent model: functions {1, x} with x^2 = 0 and
/// d x = x y, one-forms {y, x y}. Carries the partition (x, 1 - x), which
/// has a nonzero differential, so gluing genuinely uses the correction
/// term.
pub fn nilpotent_model() -> DgaModel {
    let mut c = BigradedComplex::new("nilpotent");
    c.set_dim(bd(0, 0), 2);
    c.set_dim(bd(0, 1), 2);
    c.set_diff(
        bd(0, 0),
        SparseMatrix::from_triples(2, 2, vec![(1, 1, Scalar::one())]).unwrap(),
    )
    .unwrap();
    let mut m = DgaModel::new("nilpotent", c, 1, vec![Scalar::one(), Scalar::zero()]);
    // left 1 acts as identity, left x maps 1 -> x and kills x
    m.set_wedge(
        bd(0, 0),
        bd(0, 0),
        vec![
            SparseMatrix::identity(2),
            SparseMatrix::from_triples(2, 2, vec![(1, 0, Scalar::one())]).unwrap(),
        ],
    )
    .unwrap();
    // left 1 identity on one-forms, left x maps y -> xy and kills xy
    m.set_wedge(
        bd(0, 0),
        bd(0, 1),
        vec![
            SparseMatrix::identity(2),
            SparseMatrix::from_triples(2, 2, vec![(1, 0, Scalar::one())]).unwrap(),
        ],
    )
    .unwrap();
    // right multiplication mirror: y * 1 = y, y * x = xy, xy * 1 = xy
    m.set_wedge(
        bd(0, 1),
        bd(0, 0),
        vec![
            SparseMatrix::from_triples(2, 2, vec![(0, 0, Scalar::one()), (1, 1, Scalar::one())])
                .unwrap(),
            SparseMatrix::from_triples(2, 2, vec![(1, 0, Scalar::one())]).unwrap(),
        ],
    )
    .unwrap();
    m.partition = Some((
        vec![Scalar::zero(), Scalar::one()],
        vec![Scalar::one(), Scalar::from_int(-1)],
    ));
    m
}

// ---------------------------------------------------------------------
// the torus family

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for v in start..n {
            acc.push(v);
            go(v + 1, n, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let mut acc = Vec::new();
    go(0, n, k, &mut acc, &mut out);
    out
}

fn merge_sign(a: &[usize], b: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut inversions = 0i64;
    for &x in a {
        if b.contains(&x) {
            return None;
        }
        inversions += b.iter().filter(|&&y| y < x).count() as i64;
    }
    let mut merged: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    merged.sort();
    Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
}

/// The bigraded model of the n-torus: the exterior algebra on n
/// holomorphic and n antiholomorphic one-form generators, zero
/// differential, with the integral normalized to one on the standard top
/// form and the constant partition (1/2, 1/2). Supported for n up to 4.
pub fn torus_model(n: i32) -> Result<DgaModel> {
    if !(1..=4).contains(&n) {
        return Err(Error::InfeasibleParams {
            context: format!("torus model supports n in 1..=4, got {n}"),
        });
    }
    let nu = n as usize;
    let mut c = BigradedComplex::new(format!("torus{n}"));
    let level: Vec<Vec<Vec<usize>>> = (0..=nu).map(|k| subsets(nu, k)).collect();
    for p in 0..=nu {
        for q in 0..=nu {
            c.set_dim(bd(p as i32, q as i32), level[p].len() * level[q].len());
        }
    }
    let index_of =
        |set_i: usize, q: usize, set_j: usize| -> usize { set_i * level[q].len() + set_j };
    let mut unit = vec![Scalar::zero(); 1];
    unit[0] = Scalar::one();
    let mut m = DgaModel::new(format!("torus{n}"), c, n, unit);
    for p1 in 0..=nu {
        for q1 in 0..=nu {
            for p2 in 0..=nu {
                for q2 in 0..=nu {
                    if p1 + p2 > nu || q1 + q2 > nu {
                        continue;
                    }
                    let a = bd(p1 as i32, q1 as i32);
                    let b = bd(p2 as i32, q2 as i32);
                    let dim_a = level[p1].len() * level[q1].len();
                    let dim_b = level[p2].len() * level[q2].len();
                    let dim_out = level[p1 + p2].len() * level[q1 + q2].len();
                    let mut tables = vec![SparseMatrix::new(dim_out, dim_b); dim_a];
                    for (i1, set_i1) in level[p1].iter().enumerate() {
                        for (j1, set_j1) in level[q1].iter().enumerate() {
                            let left = index_of(i1, q1, j1);
                            for (i2, set_i2) in level[p2].iter().enumerate() {
                                for (j2, set_j2) in level[q2].iter().enumerate() {
                                    let right = index_of(i2, q2, j2);
                                    let Some((s_hol, merged_i)) = merge_sign(set_i1, set_i2) else {
                                        continue;
                                    };
                                    let Some((s_anti, merged_j)) = merge_sign(set_j1, set_j2)
                                    else {
                                        continue;
                                    };
                                    // commute the antiholomorphic block of
                                    // the left factor past the holomorphic
                                    // block of the right factor
                                    let cross = if (q1 * p2) % 2 == 0 { 1 } else { -1 };
                                    let sign = s_hol * s_anti * cross;
                                    let oi = level[p1 + p2]
                                        .iter()
                                        .position(|s| s == &merged_i)
                                        .expect("merged holomorphic set");
                                    let oj = level[q1 + q2]
                                        .iter()
                                        .position(|s| s == &merged_j)
                                        .expect("merged antiholomorphic set");
                                    let out_idx = oi * level[q1 + q2].len() + oj;
                                    tables[left].set(out_idx, right, Scalar::from_int(sign));
                                }
                            }
                        }
                    }
                    m.set_wedge(a, b, tables)?;
                }
            }
        }
    }
    let top_dim = m.complex.dim_at(bd(n, n));
    let mut functional = vec![Scalar::zero(); top_dim];
    functional[top_dim - 1] = Scalar::one();
    m.integrate = Some(functional);
    let half = Scalar::from_ratio(1, 2);
    let rho: Vec<Scalar> = m.unit.iter().map(|v| &half * v).collect();
    m.partition = Some((rho.clone(), rho));
    Ok(m)
}

/// Self cover of the torus model with its pairings.
pub fn torus_cover(n: i32) -> Result<(CoverDiagram, BTreeMap<Simplex, PairingData>)> {
    let m = torus_model(n)?;
    let d = m.self_cover();
    let pairings = m.self_cover_pairings()?;
    Ok((d, pairings))
}

// ---------------------------------------------------------------------
// sheeted covers

/// The projection of k disjoint copies of the one-torus onto one copy,
/// as a cover morphism over the self covers, with pairings on both
/// levels. Its degree is k.
pub fn disjoint_cover_morphism(k: usize) -> Result<(CoverMorphism, MorphismPairings)> {
    if k == 0 {
        return Err(Error::InfeasibleParams {
            context: "a sheeted cover needs at least one sheet".into(),
        });
    }
    let base = torus_model(1)?;
    let mut upstairs = base.complex.clone();
    upstairs.name = "sheets1".into();
    for i in 1..k {
        upstairs = upstairs.direct_sum(&base.complex, format!("sheets{}", i + 1));
    }
    upstairs.name = format!("sheets{k}");
    let src = {
        let mut d = CoverDiagram::new(format!("cover(sheets{k})"), vec!["U0".into(), "U1".into()]);
        let overlap = Simplex::new(vec![0, 1]);
        for s in [Simplex::vertex(0), Simplex::vertex(1), overlap.clone()] {
            d.set_piece(s, upstairs.clone());
        }
        for v in [Simplex::vertex(0), Simplex::vertex(1)] {
            d.set_restriction(v.clone(), overlap.clone(), ChainMap::identity(&upstairs));
            d.set_extension(v, overlap.clone(), ChainMap::identity(&upstairs));
        }
        d
    };
    let tgt = base.self_cover();
    let mut m = CoverMorphism::new(format!("sheets({k})"), src.clone(), tgt.clone());
    let mut stack = ChainMap::new(base.complex.clone(), upstairs.clone(), bd(0, 0));
    for &at in &base.complex.support() {
        let dim = base.complex.dim_at(at);
        let mut block = SparseMatrix::new(dim * k, dim);
        for copy in 0..k {
            block.insert_block(copy * dim, 0, &SparseMatrix::identity(dim));
        }
        stack.set_block(at, block)?;
    }
    for s in src.simplices() {
        m.set_pullback(s.clone(), stack.clone());
    }
    let base_pd = base.pairing_data()?;
    let mut up_pd = PairingData::new(
        upstairs.clone(),
        1,
        base.unit
            .iter()
            .cloned()
            .cycle()
            .take(base.unit.len() * k)
            .collect(),
    )?;
    for p in 0..=1 {
        for q in 0..=1 {
            let at = bd(p, q);
            let small = base_pd.block_at(at);
            let mut block = SparseMatrix::new(small.rows() * k, small.cols() * k);
            for copy in 0..k {
                block.insert_block(copy * small.rows(), copy * small.cols(), &small);
            }
            up_pd.set_block(at, block)?;
        }
    }
    let mut source = BTreeMap::new();
    let mut target = BTreeMap::new();
    for s in src.simplices() {
        source.insert(s.clone(), up_pd.clone());
        target.insert(s.clone(), base_pd.clone());
    }
    Ok((m, MorphismPairings { source, target }))
}

// ---------------------------------------------------------------------
// labeled atom machinery

/// A one-dimensional generator (`interval: false`) or an acyclic
/// interval `at -> at + (0,1)` with identity differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Atom {
    at: Bidegree,
    interval: bool,
}

impl Atom {
    fn spots(&self) -> Vec<Bidegree> {
        if self.interval {
            vec![self.at, self.at.up_q()]
        } else {
            vec![self.at]
        }
    }
}

#[derive(Clone, Debug)]
struct LabeledComplex {
    complex: BigradedComplex,
    offsets: BTreeMap<(String, Bidegree), usize>,
}

fn build_labeled(name: impl Into<String>, atoms: &[(String, Atom)]) -> LabeledComplex {
    let mut dims: BTreeMap<Bidegree, usize> = BTreeMap::new();
    let mut offsets = BTreeMap::new();
    for (label, atom) in atoms {
        for spot in atom.spots() {
            let slot = dims.entry(spot).or_insert(0);
            offsets.insert((label.clone(), spot), *slot);
            *slot += 1;
        }
    }
    let mut complex = BigradedComplex::new(name);
    for (&at, &dim) in &dims {
        complex.set_dim(at, dim);
    }
    for (label, atom) in atoms {
        if atom.interval {
            let rows = complex.dim_at(atom.at.up_q());
            let cols = complex.dim_at(atom.at);
            let mut m = complex.diff_at(atom.at);
            if m.rows() != rows || m.cols() != cols {
                m = SparseMatrix::new(rows, cols);
            }
            m.set(
                offsets[&(label.clone(), atom.at.up_q())],
                offsets[&(label.clone(), atom.at)],
                Scalar::one(),
            );
            complex.set_diff(atom.at, m).expect("interval block shape");
        }
    }
    LabeledComplex { complex, offsets }
}

/// A chain map assembled from per-atom rules: each rule copies every
/// shared bidegree spot of the `from` atom onto the `to` atom with one
/// coefficient.
fn labeled_map(
    src: &LabeledComplex,
    dst: &LabeledComplex,
    rules: &[(String, String, Scalar)],
) -> ChainMap {
    let mut blocks: BTreeMap<Bidegree, SparseMatrix> = BTreeMap::new();
    for (from, to, coeff) in rules {
        if coeff.is_zero() {
            continue;
        }
        for (&(ref label, spot), &src_off) in &src.offsets {
            if label != from {
                continue;
            }
            if let Some(&dst_off) = dst.offsets.get(&(to.clone(), spot)) {
                let block = blocks.entry(spot).or_insert_with(|| {
                    SparseMatrix::new(dst.complex.dim_at(spot), src.complex.dim_at(spot))
                });
                block.set(dst_off, src_off, coeff.clone());
            }
        }
    }
    let mut map = ChainMap::new(src.complex.clone(), dst.complex.clone(), bd(0, 0));
    for (at, block) in blocks {
        map.set_block(at, block).expect("labeled map block shape");
    }
    map
}

fn random_unit(rng: &mut ChaCha8Rng) -> Scalar {
    match rng.gen_range(0..4) {
        0 => Scalar::one(),
        1 => Scalar::from_int(-1),
        2 => Scalar::i(),
        _ => Scalar::i().conj(),
    }
}

fn random_small_nonzero(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let re = rng.gen_range(-2..=2i64);
        let im = rng.gen_range(-1..=1i64);
        if re != 0 || im != 0 {
            return Scalar::from_parts(re, im);
        }
    }
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Scalar {
    if rng.gen_bool(0.2) {
        Scalar::zero()
    } else {
        random_small_nonzero(rng)
    }
}

fn random_invertible(rng: &mut ChaCha8Rng, dim: usize) -> (SparseMatrix, SparseMatrix) {
    let mut q = SparseMatrix::identity(dim);
    let mut qinv = SparseMatrix::identity(dim);
    if dim == 0 {
        return (q, qinv);
    }
    for _ in 0..(2 * dim) {
        match rng.gen_range(0..3) {
            0 if dim >= 2 => {
                let i = rng.gen_range(0..dim);
                let mut j = rng.gen_range(0..dim);
                while j == i {
                    j = rng.gen_range(0..dim);
                }
                let lambda = random_small_nonzero(rng);
                let mut e = SparseMatrix::identity(dim);
                e.set(j, i, lambda.clone());
                let mut einv = SparseMatrix::identity(dim);
                einv.set(j, i, Scalar::zero() - &lambda);
                q = e.mul(&q).unwrap();
                qinv = qinv.mul(&einv).unwrap();
            }
            1 => {
                let i = rng.gen_range(0..dim);
                let u = random_unit(rng);
                let uinv = u.inv().expect("unit scalar");
                let mut e = SparseMatrix::identity(dim);
                e.set(i, i, u);
                let mut einv = SparseMatrix::identity(dim);
                einv.set(i, i, uinv);
                q = e.mul(&q).unwrap();
                qinv = qinv.mul(&einv).unwrap();
            }
            _ if dim >= 2 => {
                let i = rng.gen_range(0..dim);
                let mut j = rng.gen_range(0..dim);
                while j == i {
                    j = rng.gen_range(0..dim);
                }
                let mut e = SparseMatrix::identity(dim);
                e.set(i, i, Scalar::zero());
                e.set(j, j, Scalar::zero());
                e.set(i, j, Scalar::one());
                e.set(j, i, Scalar::one());
                q = e.mul(&q).unwrap();
                qinv = qinv.mul(&e).unwrap();
            }
            _ => {}
        }
    }
    (q, qinv)
}

#[derive(Clone, Debug, Default)]
struct Conjugation {
    q: BTreeMap<Bidegree, SparseMatrix>,
    qinv: BTreeMap<Bidegree, SparseMatrix>,
}

impl Conjugation {
    fn q_at(&self, at: Bidegree, dim: usize) -> SparseMatrix {
        self.q
            .get(&at)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::identity(dim))
    }

    fn qinv_at(&self, at: Bidegree, dim: usize) -> SparseMatrix {
        self.qinv
            .get(&at)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::identity(dim))
    }
}

fn conjugate_complex(
    rng: &mut ChaCha8Rng,
    c: &BigradedComplex,
    name: impl Into<String>,
) -> (BigradedComplex, Conjugation) {
    let mut conj = Conjugation::default();
    for &at in &c.support() {
        let (q, qinv) = random_invertible(rng, c.dim_at(at));
        conj.q.insert(at, q);
        conj.qinv.insert(at, qinv);
    }
    let mut out = BigradedComplex::new(name);
    for (&at, &dim) in c.dims() {
        out.set_dim(at, dim);
    }
    for &at in &c.support() {
        let d = c.diff_at(at);
        if d.is_zero() {
            continue;
        }
        let up = at.up_q();
        let m = conj
            .q_at(up, c.dim_at(up))
            .mul(&d)
            .unwrap()
            .mul(&conj.qinv_at(at, c.dim_at(at)))
            .unwrap();
        out.set_diff(at, m).expect("conjugated differential shape");
    }
    (out, conj)
}

fn conjugated_map(
    raw: &ChainMap,
    src_conj: &Conjugation,
    dst_conj: &Conjugation,
    new_src: &BigradedComplex,
    new_dst: &BigradedComplex,
) -> ChainMap {
    let mut out = ChainMap::new(new_src.clone(), new_dst.clone(), bd(0, 0));
    let mut support: Vec<Bidegree> = new_src.support();
    support.extend(raw.blocks().keys().copied());
    support.sort();
    support.dedup();
    for &at in &support {
        let block = dst_conj
            .q_at(at, new_dst.dim_at(at))
            .mul(&raw.block_at(at))
            .unwrap()
            .mul(&src_conj.qinv_at(at, new_src.dim_at(at)))
            .unwrap();
        out.set_block(at, block).expect("conjugated block shape");
    }
    out
}

/// Size limits for the seeded generators: at most `atoms` basis
/// generators per construction (so every graded piece of every local
/// complex has dimension at most `atoms`) and bidegrees kept inside the
/// window `0..=max_p` by `0..=max_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeBounds {
    pub atoms: usize,
    pub max_p: i32,
    pub max_q: i32,
}

impl Default for SizeBounds {
    /// Six generators inside a 4 by 4 bidegree window.
    fn default() -> Self {
        SizeBounds {
            atoms: 6,
            max_p: 3,
            max_q: 3,
        }
    }
}

fn random_atom(rng: &mut ChaCha8Rng, bounds: SizeBounds) -> Atom {
    let at = bd(
        rng.gen_range(0..=bounds.max_p.clamp(0, 2)),
        rng.gen_range(0..=bounds.max_q.clamp(0, 2)),
    );
    let interval = rng.gen_bool(0.5) && at.q < bounds.max_q;
    Atom { at, interval }
}

// ---------------------------------------------------------------------
// random diagrams and morphisms

/// Zones assign each atom to the pieces of a two-set cover that carry it:
/// 0 left vertex only, 1 right vertex only, 2 both vertices, 3 both
/// vertices and the overlap.
fn two_set_zone_pieces(zone: u8) -> (bool, bool, bool) {
    match zone {
        0 => (true, false, false),
        1 => (false, true, false),
        2 => (true, true, false),
        _ => (true, true, true),
    }
}

/// A seeded two-set cover diagram with restriction and extension maps,
/// valid by construction: atoms are shared between pieces according to
/// random zones, wired by projections and injections, and every piece is
/// conjugated by a random basis change. Deterministic per seed and
/// bounds.
pub fn random_valid_diagram(seed: u64, bounds: SizeBounds) -> CoverDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = bounds.atoms.max(1);
    let count = rng.gen_range(hi.min(3)..=hi);
    let mut atoms: Vec<(String, Atom, u8)> = (0..count)
        .map(|i| {
            (
                format!("a{i}"),
                random_atom(&mut rng, bounds),
                rng.gen_range(0..4u8),
            )
        })
        .collect();
    if !atoms.iter().any(|(_, _, z)| *z == 3) {
        atoms[0].2 = 3;
    }
    let pick = |which: usize| -> Vec<(String, Atom)> {
        atoms
            .iter()
            .filter(|(_, _, z)| {
                let (v0, v1, ov) = two_set_zone_pieces(*z);
                [v0, v1, ov][which]
            })
            .map(|(l, a, _)| (l.clone(), *a))
            .collect()
    };
    let raw0 = build_labeled("rawU0", &pick(0));
    let raw1 = build_labeled("rawU1", &pick(1));
    let raw01 = build_labeled("rawU01", &pick(2));
    let shared_rules: Vec<(String, String, Scalar)> = atoms
        .iter()
        .filter(|(_, _, z)| *z == 3)
        .map(|(l, _, _)| (l.clone(), l.clone(), Scalar::one()))
        .collect();
    let r0 = labeled_map(&raw0, &raw01, &shared_rules);
    let r1 = labeled_map(&raw1, &raw01, &shared_rules);
    let e0 = labeled_map(&raw01, &raw0, &shared_rules);
    let e1 = labeled_map(&raw01, &raw1, &shared_rules);
    let (c0, conj0) = conjugate_complex(&mut rng, &raw0.complex, format!("U0({seed})"));
    let (c1, conj1) = conjugate_complex(&mut rng, &raw1.complex, format!("U1({seed})"));
    let (c01, conj01) = conjugate_complex(&mut rng, &raw01.complex, format!("U01({seed})"));
    let mut d = CoverDiagram::new(format!("random({seed})"), vec!["U0".into(), "U1".into()]);
    let overlap = Simplex::new(vec![0, 1]);
    d.set_piece(Simplex::vertex(0), c0.clone());
    d.set_piece(Simplex::vertex(1), c1.clone());
    d.set_piece(overlap.clone(), c01.clone());
    d.set_restriction(
        Simplex::vertex(0),
        overlap.clone(),
        conjugated_map(&r0, &conj0, &conj01, &c0, &c01),
    );
    d.set_restriction(
        Simplex::vertex(1),
        overlap.clone(),
        conjugated_map(&r1, &conj1, &conj01, &c1, &c01),
    );
    d.set_extension(
        Simplex::vertex(0),
        overlap.clone(),
        conjugated_map(&e0, &conj01, &conj0, &c01, &c0),
    );
    d.set_extension(
        Simplex::vertex(1),
        overlap,
        conjugated_map(&e1, &conj01, &conj1, &c01, &c1),
    );
    d
}

/// A seeded three-set cover diagram over the full triangle nerve. Each
/// atom lives on the closure of one random simplex, restrictions project
/// onto the atoms surviving on the larger simplex; this makes all
/// two-step composites agree.
pub fn random_three_set_diagram(seed: u64) -> CoverDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nerve: Vec<Simplex> = vec![
        Simplex::vertex(0),
        Simplex::vertex(1),
        Simplex::vertex(2),
        Simplex::new(vec![0, 1]),
        Simplex::new(vec![0, 2]),
        Simplex::new(vec![1, 2]),
        Simplex::new(vec![0, 1, 2]),
    ];
    let count = rng.gen_range(3..=6);
    let atoms: Vec<(String, Atom, Simplex)> = (0..count)
        .map(|i| {
            let home = nerve[rng.gen_range(0..nerve.len())].clone();
            (
                format!("a{i}"),
                random_atom(&mut rng, SizeBounds::default()),
                home,
            )
        })
        .collect();
    let atoms_on = |s: &Simplex| -> Vec<(String, Atom)> {
        atoms
            .iter()
            .filter(|(_, _, home)| s.is_face_of(home))
            .map(|(l, a, _)| (l.clone(), *a))
            .collect()
    };
    let mut raws = BTreeMap::new();
    let mut conjugated = BTreeMap::new();
    for s in &nerve {
        let raw = build_labeled(format!("raw{}", s.key()), &atoms_on(s));
        let (c, conj) = conjugate_complex(&mut rng, &raw.complex, format!("{}({seed})", s.key()));
        raws.insert(s.clone(), raw);
        conjugated.insert(s.clone(), (c, conj));
    }
    let mut d = CoverDiagram::new(
        format!("random3({seed})"),
        vec!["A".into(), "B".into(), "C".into()],
    );
    for s in &nerve {
        d.set_piece(s.clone(), conjugated[s].0.clone());
    }
    for s in &nerve {
        for (_, face) in s.faces() {
            let rules: Vec<(String, String, Scalar)> = atoms
                .iter()
                .filter(|(_, _, home)| s.is_face_of(home))
                .map(|(l, _, _)| (l.clone(), l.clone(), Scalar::one()))
                .collect();
            let raw_r = labeled_map(&raws[&face], &raws[s], &rules);
            let raw_e = labeled_map(&raws[s], &raws[&face], &rules);
            let (ref c_face, ref conj_face) = conjugated[&face];
            let (ref c_s, ref conj_s) = conjugated[s];
            d.set_restriction(
                face.clone(),
                s.clone(),
                conjugated_map(&raw_r, conj_face, conj_s, c_face, c_s),
            );
            d.set_extension(
                face.clone(),
                s.clone(),
                conjugated_map(&raw_e, conj_s, conj_face, c_s, c_face),
            );
        }
    }
    d
}

/// Seeded two-set diagram with the default size bounds.
pub fn random_two_set_diagram(seed: u64) -> CoverDiagram {
    random_valid_diagram(seed, SizeBounds::default())
}

/// A seeded valid morphism between two-set covered spaces: the target is
/// built from a shared atom pool, the source from the same pool plus
/// extra atoms, and the pullback scales each shared atom by one random
/// coefficient, so all squares commute by construction.
pub fn random_morphism(seed: u64) -> CoverMorphism {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let count = rng.gen_range(2..=5);
    let mut shared: Vec<(String, Atom, u8, Scalar)> = (0..count)
        .map(|i| {
            (
                format!("s{i}"),
                random_atom(&mut rng, SizeBounds::default()),
                rng.gen_range(0..4u8),
                random_coeff(&mut rng),
            )
        })
        .collect();
    if !shared.iter().any(|(_, _, z, _)| *z == 3) {
        shared[0].2 = 3;
    }
    let extra_count = rng.gen_range(0..=2);
    let extras: Vec<(String, Atom, u8)> = (0..extra_count)
        .map(|i| {
            (
                format!("x{i}"),
                random_atom(&mut rng, SizeBounds::default()),
                rng.gen_range(0..4u8),
            )
        })
        .collect();
    let pick_tgt = |which: usize| -> Vec<(String, Atom)> {
        shared
            .iter()
            .filter(|(_, _, z, _)| {
                let (v0, v1, ov) = two_set_zone_pieces(*z);
                [v0, v1, ov][which]
            })
            .map(|(l, a, _, _)| (l.clone(), *a))
            .collect()
    };
    let pick_src = |which: usize| -> Vec<(String, Atom)> {
        let mut list = pick_tgt(which);
        list.extend(
            extras
                .iter()
                .filter(|(_, _, z)| {
                    let (v0, v1, ov) = two_set_zone_pieces(*z);
                    [v0, v1, ov][which]
                })
                .map(|(l, a, _)| (l.clone(), *a)),
        );
        list
    };
    let nerve = [
        Simplex::vertex(0),
        Simplex::vertex(1),
        Simplex::new(vec![0, 1]),
    ];
    let shared_rules = |atoms: &[(String, Atom)]| -> Vec<(String, String, Scalar)> {
        atoms
            .iter()
            .filter(|(l, _)| {
                shared
                    .iter()
                    .any(|(sl, _, z, _)| sl == l && two_set_zone_pieces(*z).2)
            })
            .map(|(l, _)| (l.clone(), l.clone(), Scalar::one()))
            .collect()
    };
    // also share the overlap-zoned extras between source pieces
    let src_rules = |atoms: &[(String, Atom)]| -> Vec<(String, String, Scalar)> {
        let mut rules = shared_rules(atoms);
        rules.extend(
            atoms
                .iter()
                .filter(|(l, _)| {
                    extras
                        .iter()
                        .any(|(xl, _, z)| xl == l && two_set_zone_pieces(*z).2)
                })
                .map(|(l, _)| (l.clone(), l.clone(), Scalar::one())),
        );
        rules
    };
    let build_level = |pick: &dyn Fn(usize) -> Vec<(String, Atom)>,
                       rules: &dyn Fn(&[(String, Atom)]) -> Vec<(String, String, Scalar)>,
                       tag: &str,
                       rng: &mut ChaCha8Rng|
     -> (
        CoverDiagram,
        BTreeMap<Simplex, (LabeledComplex, Conjugation)>,
    ) {
        let raw0 = build_labeled(format!("{tag}U0"), &pick(0));
        let raw1 = build_labeled(format!("{tag}U1"), &pick(1));
        let raw01 = build_labeled(format!("{tag}U01"), &pick(2));
        let rules0 = rules(&pick(0));
        let rules1 = rules(&pick(1));
        let mut d = CoverDiagram::new(format!("{tag}({seed})"), vec!["U0".into(), "U1".into()]);
        let mut data = BTreeMap::new();
        for (s, raw) in [
            (nerve[0].clone(), raw0),
            (nerve[1].clone(), raw1),
            (nerve[2].clone(), raw01),
        ] {
            let (c, conj) =
                conjugate_complex(rng, &raw.complex, format!("{tag}{}({seed})", s.key()));
            d.set_piece(s.clone(), c);
            data.insert(s, (raw, conj));
        }
        for (v, rules_v) in [(nerve[0].clone(), rules0), (nerve[1].clone(), rules1)] {
            let (ref raw_v, ref conj_v) = data[&v];
            let (ref raw_ov, ref conj_ov) = data[&nerve[2]];
            let raw_r = labeled_map(raw_v, raw_ov, &rules_v);
            let raw_e = labeled_map(raw_ov, raw_v, &rules_v);
            let c_v = d.complex_at(&v).unwrap().clone();
            let c_ov = d.complex_at(&nerve[2]).unwrap().clone();
            d.set_restriction(
                v.clone(),
                nerve[2].clone(),
                conjugated_map(&raw_r, conj_v, conj_ov, &c_v, &c_ov),
            );
            d.set_extension(
                v.clone(),
                nerve[2].clone(),
                conjugated_map(&raw_e, conj_ov, conj_v, &c_ov, &c_v),
            );
        }
        (d, data)
    };
    let (tgt, tgt_data) = build_level(&pick_tgt, &shared_rules, "tgt", &mut rng);
    let (src, src_data) = build_level(&pick_src, &src_rules, "src", &mut rng);
    let mut m = CoverMorphism::new(format!("random({seed})"), src.clone(), tgt.clone());
    for s in &nerve {
        let pull_rules: Vec<(String, String, Scalar)> = shared
            .iter()
            .map(|(l, _, _, coeff)| (l.clone(), l.clone(), coeff.clone()))
            .collect();
        let (ref raw_tgt, ref conj_tgt) = tgt_data[s];
        let (ref raw_src, ref conj_src) = src_data[s];
        let raw_pull = labeled_map(raw_tgt, raw_src, &pull_rules);
        let c_tgt = tgt.complex_at(s).unwrap().clone();
        let c_src = src.complex_at(s).unwrap().clone();
        m.set_pullback(
            s.clone(),
            conjugated_map(&raw_pull, conj_tgt, conj_src, &c_tgt, &c_src),
        );
    }
    m
}

/// A seeded global complex covered by conjugated copies of itself, with
/// the comparison maps onto the vertex pieces. The canonical map into the
/// total complex is an isomorphism on cohomology.
pub fn random_self_cover(
    seed: u64,
) -> (CoverDiagram, BigradedComplex, BTreeMap<Simplex, ChainMap>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(7));
    let count = rng.gen_range(2..=5);
    let atoms: Vec<(String, Atom)> = (0..count)
        .map(|i| {
            (
                format!("g{i}"),
                random_atom(&mut rng, SizeBounds::default()),
            )
        })
        .collect();
    let raw = build_labeled(format!("global({seed})"), &atoms);
    let global = raw.complex.clone();
    let nerve = [
        Simplex::vertex(0),
        Simplex::vertex(1),
        Simplex::new(vec![0, 1]),
    ];
    let mut pieces = BTreeMap::new();
    for s in &nerve {
        let (c, conj) = conjugate_complex(&mut rng, &global, format!("piece{}({seed})", s.key()));
        pieces.insert(s.clone(), (c, conj));
    }
    let mut d = CoverDiagram::new(format!("selfcover({seed})"), vec!["U0".into(), "U1".into()]);
    for s in &nerve {
        d.set_piece(s.clone(), pieces[s].0.clone());
    }
    let id_rules: Vec<(String, String, Scalar)> = atoms
        .iter()
        .map(|(l, _)| (l.clone(), l.clone(), Scalar::one()))
        .collect();
    let raw_id = labeled_map(&raw, &raw, &id_rules);
    for v in [&nerve[0], &nerve[1]] {
        let (ref c_v, ref conj_v) = pieces[v];
        let (ref c_ov, ref conj_ov) = pieces[&nerve[2]];
        d.set_restriction(
            v.clone(),
            nerve[2].clone(),
            conjugated_map(&raw_id, conj_v, conj_ov, c_v, c_ov),
        );
        d.set_extension(
            v.clone(),
            nerve[2].clone(),
            conjugated_map(&raw_id, conj_ov, conj_v, c_ov, c_v),
        );
    }
    let trivial = Conjugation::default();
    let mut to_pieces = BTreeMap::new();
    for v in [&nerve[0], &nerve[1]] {
        let (ref c_v, ref conj_v) = pieces[v];
        to_pieces.insert(
            v.clone(),
            conjugated_map(&raw_id, &trivial, conj_v, &global, c_v),
        );
    }
    (d, global, to_pieces)
}

// ---------------------------------------------------------------------
// synthetic blow-up bundles

/// Placement plan for a synthetic blow-up bundle. Each list entry plants
/// one gadget at the given bidegree:
/// - `global_shared`: a class present on every piece, both levels;
/// - `u0_classes`: a class on the omitted piece only, both levels;
/// - `relative_shared`: a kept-piece class on both levels;
/// - `relative_new`: a kept-piece class upstairs only (these build the
///   quotient profile);
/// - `boundary_pairs`: an omitted-piece class restricting onto an
///   overlap class, both levels, which feeds the connecting map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupParams {
    pub name: String,
    pub n: i32,
    pub global_shared: Vec<Bidegree>,
    pub u0_classes: Vec<Bidegree>,
    pub relative_shared: Vec<Bidegree>,
    pub relative_new: Vec<Bidegree>,
    pub boundary_pairs: Vec<Bidegree>,
    /// Requested rank deficit of the pullback over the omitted piece.
    /// Anything nonzero contradicts the isomorphism hypothesis, so the
    /// builder refuses it.
    pub u0_pullback_rank_deficit: usize,
}

impl BlowupParams {
    pub fn named(name: impl Into<String>, n: i32) -> Self {
        BlowupParams {
            name: name.into(),
            n,
            global_shared: Vec::new(),
            u0_classes: Vec::new(),
            relative_shared: Vec::new(),
            relative_new: Vec::new(),
            boundary_pairs: Vec::new(),
            u0_pullback_rank_deficit: 0,
        }
    }

    /// The quotient profile the construction realizes: at each bidegree,
    /// the number of upstairs-only kept classes.
    pub fn expected_quotient(&self) -> BTreeMap<Bidegree, usize> {
        let mut out = BTreeMap::new();
        for &at in &self.relative_new {
            *out.entry(at).or_insert(0) += 1;
        }
        out
    }
}

/// Build a two-level covered-space morphism realizing the requested
/// gadget placement. All piece differentials vanish; the interesting
/// structure lives in the restriction maps and in which classes exist on
/// which level. Infeasible requests are refused.
pub fn synthetic_blowup_bundle(params: &BlowupParams) -> Result<CoverMorphism> {
    if params.u0_pullback_rank_deficit > 0 {
        return Err(Error::InfeasibleParams {
            context: format!(
                "a pullback rank deficit of {} over the omitted piece contradicts the isomorphism hypothesis",
                params.u0_pullback_rank_deficit
            ),
        });
    }
    struct Placement {
        label: String,
        at: Bidegree,
        zone: u8, // 0 omitted piece, 1 kept piece, 3 everywhere
        upstairs_only: bool,
    }
    let mut placements: Vec<Placement> = Vec::new();
    let mut boundary: Vec<(String, String, Bidegree)> = Vec::new();
    for (i, &at) in params.global_shared.iter().enumerate() {
        placements.push(Placement {
            label: format!("g{i}"),
            at,
            zone: 3,
            upstairs_only: false,
        });
    }
    for (i, &at) in params.u0_classes.iter().enumerate() {
        placements.push(Placement {
            label: format!("u{i}"),
            at,
            zone: 0,
            upstairs_only: false,
        });
    }
    for (i, &at) in params.relative_shared.iter().enumerate() {
        placements.push(Placement {
            label: format!("c{i}"),
            at,
            zone: 1,
            upstairs_only: false,
        });
    }
    for (i, &at) in params.relative_new.iter().enumerate() {
        placements.push(Placement {
            label: format!("b{i}"),
            at,
            zone: 1,
            upstairs_only: true,
        });
    }
    for (i, &at) in params.boundary_pairs.iter().enumerate() {
        let x = format!("ex{i}");
        let y = format!("ey{i}");
        placements.push(Placement {
            label: x.clone(),
            at,
            zone: 0,
            upstairs_only: false,
        });
        // the partner lives on the overlap only
        placements.push(Placement {
            label: y.clone(),
            at,
            zone: 4,
            upstairs_only: false,
        });
        boundary.push((x, y, at));
    }
    let on_piece = |zone: u8, which: usize| -> bool {
        match zone {
            0 => which == 0,
            1 => which == 1,
            3 => true,
            4 => which == 2,
            _ => false,
        }
    };
    let atoms_for = |which: usize, upstairs: bool| -> Vec<(String, Atom)> {
        placements
            .iter()
            .filter(|pl| on_piece(pl.zone, which) && (upstairs || !pl.upstairs_only))
            .map(|pl| {
                (
                    pl.label.clone(),
                    Atom {
                        at: pl.at,
                        interval: false,
                    },
                )
            })
            .collect()
    };
    let nerve = [
        Simplex::vertex(0),
        Simplex::vertex(1),
        Simplex::new(vec![0, 1]),
    ];
    let build_level = |upstairs: bool, tag: &str| -> (CoverDiagram, Vec<LabeledComplex>) {
        let raws: Vec<LabeledComplex> = (0..3)
            .map(|w| build_labeled(format!("{tag}{w}"), &atoms_for(w, upstairs)))
            .collect();
        let mut d = CoverDiagram::new(
            format!("{}-{tag}", params.name),
            vec!["U0".into(), "U1".into()],
        );
        for (w, s) in nerve.iter().enumerate() {
            let mut c = raws[w].complex.clone();
            c.name = format!("{}-{tag}-{}", params.name, s.key());
            d.set_piece(s.clone(), c);
        }
        for (w, v) in [&nerve[0], &nerve[1]].into_iter().enumerate() {
            let mut r_rules: Vec<(String, String, Scalar)> = placements
                .iter()
                .filter(|pl| pl.zone == 3 && (upstairs || !pl.upstairs_only))
                .map(|pl| (pl.label.clone(), pl.label.clone(), Scalar::one()))
                .collect();
            let mut e_rules = r_rules.clone();
            if w == 0 {
                for (x, y, _) in &boundary {
                    r_rules.push((x.clone(), y.clone(), Scalar::one()));
                    e_rules.push((y.clone(), x.clone(), Scalar::one()));
                }
            }
            let raw_r = labeled_map(&raws[w], &raws[2], &r_rules);
            let raw_e = labeled_map(&raws[2], &raws[w], &e_rules);
            let mut r = ChainMap::new(
                d.complex_at(v).unwrap().clone(),
                d.complex_at(&nerve[2]).unwrap().clone(),
                bd(0, 0),
            );
            for (at, block) in raw_r.blocks() {
                r.set_block(*at, block.clone()).unwrap();
            }
            let mut e = ChainMap::new(
                d.complex_at(&nerve[2]).unwrap().clone(),
                d.complex_at(v).unwrap().clone(),
                bd(0, 0),
            );
            for (at, block) in raw_e.blocks() {
                e.set_block(*at, block.clone()).unwrap();
            }
            d.set_restriction(v.clone(), nerve[2].clone(), r);
            d.set_extension(v.clone(), nerve[2].clone(), e);
        }
        (d, raws)
    };
    let (tgt, tgt_raws) = build_level(false, "down");
    let (src, src_raws) = build_level(true, "up");
    let mut m = CoverMorphism::new(params.name.clone(), src.clone(), tgt.clone());
    for (w, s) in nerve.iter().enumerate() {
        let rules: Vec<(String, String, Scalar)> = placements
            .iter()
            .filter(|pl| !pl.upstairs_only && on_piece(pl.zone, w))
            .map(|pl| (pl.label.clone(), pl.label.clone(), Scalar::one()))
            .collect();
        let raw_pull = labeled_map(&tgt_raws[w], &src_raws[w], &rules);
        let mut pull = ChainMap::new(
            tgt.complex_at(s).unwrap().clone(),
            src.complex_at(s).unwrap().clone(),
            bd(0, 0),
        );
        for (at, block) in raw_pull.blocks() {
            pull.set_block(*at, block.clone()).unwrap();
        }
        m.set_pullback(s.clone(), pull);
    }
    m.check()?;
    Ok(m)
}

/// Five ready-made blow-up bundles with pairwise distinct quotient
/// profiles.
pub fn blowup_preset(index: usize) -> Result<BlowupParams> {
    let mut params = BlowupParams::named(format!("blowup{index}"), 2);
    match index {
        1 => {
            params.global_shared = vec![bd(0, 0), bd(1, 1)];
            params.u0_classes = vec![bd(0, 0), bd(1, 1)];
        }
        2 => {
            params.global_shared = vec![bd(0, 0)];
            params.u0_classes = vec![bd(0, 0)];
            params.relative_new = vec![bd(1, 1)];
            params.boundary_pairs = vec![bd(1, 0)];
        }
        3 => {
            params.global_shared = vec![bd(0, 0)];
            params.u0_classes = vec![bd(0, 0)];
            params.relative_shared = vec![bd(1, 1)];
            params.relative_new = vec![bd(1, 1), bd(1, 1)];
        }
        4 => {
            params.global_shared = vec![bd(0, 0)];
            params.u0_classes = vec![bd(0, 0), bd(1, 1)];
            params.relative_new = vec![bd(1, 1), bd(2, 2)];
            params.boundary_pairs = vec![bd(0, 1)];
        }
        5 => {
            params.global_shared = vec![bd(0, 0), bd(2, 2)];
            params.u0_classes = vec![bd(0, 1)];
            params.relative_shared = vec![bd(2, 1)];
            params.relative_new = vec![bd(1, 1), bd(1, 2), bd(2, 1)];
        }
        _ => {
            return Err(Error::InfeasibleParams {
                context: format!("no blow-up preset {index}; presets are 1..=5"),
            })
        }
    }
    Ok(params)
}

// ---------------------------------------------------------------------
// bundles

/// An in-memory collection of named objects, the unit the command line
/// loads, checks, and emits. Diagrams, morphisms, and models are keyed
/// by their own names; pairing sets are keyed by the name of the diagram
/// they pair.
#[derive(Clone, Debug, Default)]
pub struct ModelBundle {
    pub name: String,
    pub diagrams: BTreeMap<String, CoverDiagram>,
    pub morphisms: BTreeMap<String, CoverMorphism>,
    pub pairings: BTreeMap<String, BTreeMap<Simplex, PairingData>>,
    pub models: BTreeMap<String, DgaModel>,
    pub expected: BTreeMap<String, String>,
}

pub fn builtin_bundle_names() -> Vec<&'static str> {
    vec![
        "torus:1",
        "torus:2",
        "sheets:2",
        "sheets:3",
        "blowup:1",
        "blowup:2",
        "blowup:3",
        "blowup:4",
        "blowup:5",
        "nilpotent",
        "random:<seed>",
    ]
}

/// Construct a named built-in bundle: `torus:N`, `sheets:K`, `blowup:I`,
/// `random:SEED`, or `nilpotent`.
pub fn builtin_bundle(spec: &str) -> Result<ModelBundle> {
    let bad = |msg: String| Error::Parse {
        file: format!("bundle spec '{spec}'"),
        line: 0,
        message: msg,
    };
    let mut bundle = ModelBundle {
        name: spec.replace(':', "-"),
        ..ModelBundle::default()
    };
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("torus", Some(arg)) => {
            let n: i32 = arg
                .parse()
                .map_err(|_| bad(format!("bad torus size '{arg}'")))?;
            let model = torus_model(n)?;
            let (d, pairings) = torus_cover(n)?;
            for p in 0..=n {
                for q in 0..=n {
                    let dim = model.complex.dim_at(bd(p, q));
                    bundle
                        .expected
                        .insert(format!("h.{p}.{q}"), dim.to_string());
                }
            }
            bundle.pairings.insert(d.name.clone(), pairings);
            bundle.diagrams.insert(d.name.clone(), d);
            bundle.models.insert(model.name.clone(), model);
        }
        ("sheets", Some(arg)) => {
            let k: usize = arg
                .parse()
                .map_err(|_| bad(format!("bad sheet count '{arg}'")))?;
            let (m, pairings) = disjoint_cover_morphism(k)?;
            bundle.expected.insert("degree".into(), k.to_string());
            bundle
                .diagrams
                .insert(m.source.name.clone(), m.source.clone());
            bundle
                .diagrams
                .insert(m.target.name.clone(), m.target.clone());
            bundle
                .pairings
                .insert(m.source.name.clone(), pairings.source);
            bundle
                .pairings
                .insert(m.target.name.clone(), pairings.target);
            bundle.morphisms.insert(m.name.clone(), m);
        }
        ("blowup", Some(arg)) => {
            let i: usize = arg
                .parse()
                .map_err(|_| bad(format!("bad preset index '{arg}'")))?;
            let params = blowup_preset(i)?;
            let m = synthetic_blowup_bundle(&params)?;
            for (at, count) in params.expected_quotient() {
                bundle
                    .expected
                    .insert(format!("quotient.{}.{}", at.p, at.q), count.to_string());
            }
            bundle
                .diagrams
                .insert(m.source.name.clone(), m.source.clone());
            bundle
                .diagrams
                .insert(m.target.name.clone(), m.target.clone());
            bundle.morphisms.insert(m.name.clone(), m);
        }
        ("random", Some(arg)) => {
            let seed: u64 = arg.parse().map_err(|_| bad(format!("bad seed '{arg}'")))?;
            let d = random_valid_diagram(seed, SizeBounds::default());
            bundle.diagrams.insert(d.name.clone(), d);
        }
        ("nilpotent", None) => {
            let model = nilpotent_model();
            let d = model.self_cover();
            bundle.diagrams.insert(d.name.clone(), d);
            bundle.models.insert(model.name.clone(), model);
        }
        _ => {
            return Err(bad(
                "expected torus:N, sheets:K, blowup:I, random:SEED, or nilpotent".into(),
            ))
        }
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::cech_cohomology;
    use crate::morphism::{blowup_decomposition, compute_degree, BlowupOutcome};

    #[test]
    fn nilpotent_model_is_valid_and_associative() {
        let m = nilpotent_model();
        m.check().unwrap();
        m.check_associativity().unwrap();
    }

    #[test]
    fn nilpotent_glue_uses_the_correction_term() {
        let m = nilpotent_model();
        let mut components = BTreeMap::new();
        // (y, y + xy, x): closed because the component difference is d x
        components.insert(Simplex::vertex(0), vec![Scalar::one(), Scalar::zero()]);
        components.insert(Simplex::vertex(1), vec![Scalar::one(), Scalar::one()]);
        components.insert(
            Simplex::new(vec![0, 1]),
            vec![Scalar::zero(), Scalar::one()],
        );
        let x = CechElement {
            p: 0,
            q: 1,
            components,
        };
        let glued = glue_global(&m, &x).unwrap();
        assert_eq!(glued, vec![Scalar::one(), Scalar::one()]);
        let h = m.complex.cohomology(bd(0, 1)).unwrap();
        assert_eq!(h.dim, 1);
        assert_eq!(h.class_coordinates(&glued).unwrap(), vec![Scalar::one()]);
    }

    #[test]
    fn glue_rejects_non_cocycles() {
        let m = nilpotent_model();
        let mut components = BTreeMap::new();
        components.insert(Simplex::vertex(0), vec![Scalar::one(), Scalar::zero()]);
        // the component difference is not d of the overlap part
        components.insert(Simplex::vertex(1), vec![Scalar::one(), Scalar::one()]);
        components.insert(
            Simplex::new(vec![0, 1]),
            vec![Scalar::zero(), Scalar::zero()],
        );
        let x = CechElement {
            p: 0,
            q: 1,
            components,
        };
        assert!(matches!(
            glue_global(&m, &x),
            Err(Error::GlueInputNotClosed)
        ));
    }

    #[test]
    fn torus_dimensions_are_binomial_products() {
        for n in 1..=4 {
            let m = torus_model(n).unwrap();
            if n < 4 {
                m.check().unwrap();
            } else {
                m.complex.validate().into_result(&m.complex.name).unwrap();
            }
            let binom = |n: i64, k: i64| -> i64 {
                if k < 0 || k > n {
                    return 0;
                }
                let mut acc = 1i64;
                for i in 0..k {
                    acc = acc * (n - i) / (i + 1);
                }
                acc
            };
            for p in 0..=n {
                for q in 0..=n {
                    let expected = (binom(n as i64, p as i64) * binom(n as i64, q as i64)) as usize;
                    assert_eq!(m.complex.dim_at(bd(p, q)), expected, "n={n} at ({p},{q})");
                }
            }
        }
    }

    #[test]
    fn torus_one_products_have_the_classical_signs() {
        let m = torus_model(1).unwrap();
        m.check_associativity().unwrap();
        let one = vec![Scalar::one()];
        // dz ^ dzbar = top, dzbar ^ dz = -top
        assert_eq!(
            m.wedge(bd(1, 0), &one, bd(0, 1), &one).unwrap(),
            vec![Scalar::one()]
        );
        assert_eq!(
            m.wedge(bd(0, 1), &one, bd(1, 0), &one).unwrap(),
            vec![Scalar::from_int(-1)]
        );
        assert_eq!(m.integrate(&vec![Scalar::one()]).unwrap(), Scalar::one());
        m.pairing_data().unwrap();
    }

    #[test]
    fn torus_cover_cohomology_is_cover_independent() {
        let (d, _) = torus_cover(1).unwrap();
        let m = torus_model(1).unwrap();
        for p in 0..=1 {
            for q in 0..=1 {
                assert_eq!(
                    cech_cohomology(&d, p, q).unwrap().dim,
                    m.complex.dim_at(bd(p, q)),
                    "({p},{q})"
                );
            }
        }
    }

    #[test]
    fn sheeted_cover_has_degree_k() {
        for k in 1..=3 {
            let (m, pairings) = disjoint_cover_morphism(k).unwrap();
            m.check().unwrap();
            let degree = compute_degree(&m, &pairings, &Simplex::vertex(1)).unwrap();
            assert_eq!(degree, Scalar::from_int(k as i64));
        }
    }

    #[test]
    fn random_diagrams_are_valid() {
        for seed in 0..8 {
            let d = random_valid_diagram(seed, SizeBounds::default());
            d.check().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            total_complex_full(&d).unwrap();
            let t = random_three_set_diagram(seed);
            t.check()
                .unwrap_or_else(|e| panic!("three-set seed {seed}: {e}"));
            total_complex_full(&t).unwrap();
        }
    }

    #[test]
    fn random_morphisms_are_valid() {
        for seed in 0..6 {
            let m = random_morphism(seed);
            m.check().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn random_self_cover_comparison_maps_exist() {
        for seed in 0..4 {
            let (d, global, to_pieces) = random_self_cover(seed);
            d.check().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let map = crate::cover::canonical_map(&d, &global, &to_pieces)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            for &at in &global.support() {
                assert!(map.is_iso_on_cohomology(at).unwrap(), "seed {seed} at {at}");
            }
        }
    }

    #[test]
    fn blowup_presets_are_certified_with_their_profiles() {
        let mut seen_profiles = Vec::new();
        for index in 1..=5 {
            let params = blowup_preset(index).unwrap();
            let expected = params.expected_quotient();
            let m = synthetic_blowup_bundle(&params).unwrap();
            match blowup_decomposition(&m, "U0").unwrap() {
                BlowupOutcome::Certified { entries } => {
                    for e in &entries {
                        assert!(e.identity_holds(), "preset {index} at {}", e.at);
                    }
                    let mut profile = BTreeMap::new();
                    for e in &entries {
                        if e.quotient_dim() > 0 {
                            profile.insert(e.at, e.quotient_dim());
                        }
                    }
                    assert_eq!(profile, expected, "preset {index}");
                    seen_profiles.push(profile);
                }
                BlowupOutcome::Rejected { witnesses } => {
                    panic!("preset {index} rejected: {witnesses:?}")
                }
            }
        }
        for i in 0..seen_profiles.len() {
            for j in i + 1..seen_profiles.len() {
                assert_ne!(seen_profiles[i], seen_profiles[j], "profiles {i} and {j}");
            }
        }
    }

    #[test]
    fn infeasible_blowup_params_are_refused() {
        let mut params = blowup_preset(2).unwrap();
        params.u0_pullback_rank_deficit = 1;
        assert!(matches!(
            synthetic_blowup_bundle(&params),
            Err(Error::InfeasibleParams { .. })
        ));
    }

    #[test]
    fn builtin_bundles_build() {
        for spec in ["torus:1", "sheets:2", "blowup:3", "random:5", "nilpotent"] {
            let b = builtin_bundle(spec).unwrap();
            assert!(!b.diagrams.is_empty(), "{spec}");
        }
        assert!(builtin_bundle("bogus:1").is_err());
    }
}
