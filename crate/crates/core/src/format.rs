//! Line-oriented text format for bundles.
//!
//! A bundle file is a sequence of sections, each opened by a keyword line
//! and closed by `end`. Blank lines and `#` comments are ignored. All
//! emission is sorted, so saving the same bundle twice produces identical
//! bytes. Complexes form a pool keyed by their own names; diagrams,
//! models, pairings, and morphisms reference them by name.
//!
//! ```text
//! bundle <name>
//! complex <name>
//!   space <p> <q> <dim>
//!   diff <p> <q> <row> <col> <value>
//! end
//! diagram <name>
//!   sets <label> ...
//!   extensions on|off
//!   simplex <key>
//!   piece <key> <complex>
//!   restrict <face> <simplex> <p> <q> <row> <col> <value>
//!   extend <face> <simplex> <p> <q> <row> <col> <value>
//! end
//! model <name>
//!   complex <name>
//!   square <n>
//!   unit <idx> <value>
//!   with-integrate / integrate <idx> <value>
//!   with-partition / partition <0|1> <idx> <value>
//!   wedge <p1> <q1> <p2> <q2> <j> <row> <col> <value>
//! end
//! pairings <diagram-name>
//!   pairing <simplex> <complex> <n>
//!   punit <simplex> <idx> <value>
//!   pblock <simplex> <p> <q> <row> <col> <value>
//! end
//! morphism <name>
//!   source <diagram-name>
//!   target <diagram-name>
//!   pull <simplex> <p> <q> <row> <col> <value>
//! end
//! expected <key> <value>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::bicomplex::{bd, Bidegree, BigradedComplex, ChainMap};
use crate::cover::{CoverDiagram, Simplex};
use crate::duality::PairingData;
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::models::{DgaModel, ModelBundle};
use crate::morphism::CoverMorphism;
use crate::scalar::Scalar;

// ---------------------------------------------------------------------
// writing

fn clean_name(s: &str) -> String {
    let joined: Vec<&str> = s.split_whitespace().collect();
    joined.join("_")
}

fn write_complex(out: &mut String, c: &BigradedComplex) {
    writeln!(out, "complex {}", clean_name(&c.name)).unwrap();
    for &at in &c.support() {
        writeln!(out, "space {} {} {}", at.p, at.q, c.dim_at(at)).unwrap();
    }
    for &at in &c.support() {
        for (r, col, v) in c.diff_at(at).entries() {
            writeln!(out, "diff {} {} {r} {col} {v}", at.p, at.q).unwrap();
        }
    }
    writeln!(out, "end").unwrap();
}

fn write_map_entries(out: &mut String, prefix: &str, map: &ChainMap) {
    for (at, block) in map.blocks() {
        for (r, c, v) in block.entries() {
            writeln!(out, "{prefix} {} {} {r} {c} {v}", at.p, at.q).unwrap();
        }
    }
}

fn write_diagram(out: &mut String, d: &CoverDiagram) {
    writeln!(out, "diagram {}", clean_name(&d.name)).unwrap();
    let labels: Vec<String> = d.index_set.iter().map(|l| clean_name(l)).collect();
    writeln!(out, "sets {}", labels.join(" ")).unwrap();
    writeln!(
        out,
        "extensions {}",
        if d.has_extensions() { "on" } else { "off" }
    )
    .unwrap();
    for s in d.simplices() {
        writeln!(out, "simplex {}", s.key()).unwrap();
    }
    for s in d.simplices() {
        if let Ok(c) = d.complex_at(s) {
            writeln!(out, "piece {} {}", s.key(), clean_name(&c.name)).unwrap();
        }
    }
    for ((face, simplex), map) in d.restrictions() {
        let prefix = format!("restrict {} {}", face.key(), simplex.key());
        write_map_entries(out, &prefix, map);
    }
    for ((face, simplex), map) in d.extensions() {
        let prefix = format!("extend {} {}", face.key(), simplex.key());
        write_map_entries(out, &prefix, map);
    }
    writeln!(out, "end").unwrap();
}

fn write_model(out: &mut String, m: &DgaModel) {
    writeln!(out, "model {}", clean_name(&m.name)).unwrap();
    writeln!(out, "complex {}", clean_name(&m.complex.name)).unwrap();
    writeln!(out, "square {}", m.n).unwrap();
    for (idx, v) in m.unit.iter().enumerate() {
        if !v.is_zero() {
            writeln!(out, "unit {idx} {v}").unwrap();
        }
    }
    if let Some(functional) = &m.integrate {
        writeln!(out, "with-integrate").unwrap();
        for (idx, v) in functional.iter().enumerate() {
            if !v.is_zero() {
                writeln!(out, "integrate {idx} {v}").unwrap();
            }
        }
    }
    if let Some((rho0, rho1)) = &m.partition {
        writeln!(out, "with-partition").unwrap();
        for (half, rho) in [(0, rho0), (1, rho1)] {
            for (idx, v) in rho.iter().enumerate() {
                if !v.is_zero() {
                    writeln!(out, "partition {half} {idx} {v}").unwrap();
                }
            }
        }
    }
    for ((a, b), tables) in m.wedge_tables() {
        for (j, table) in tables.iter().enumerate() {
            for (r, c, v) in table.entries() {
                writeln!(out, "wedge {} {} {} {} {j} {r} {c} {v}", a.p, a.q, b.p, b.q).unwrap();
            }
        }
    }
    writeln!(out, "end").unwrap();
}

fn write_pairings(out: &mut String, key: &str, set: &BTreeMap<Simplex, PairingData>) {
    writeln!(out, "pairings {}", clean_name(key)).unwrap();
    for (s, pd) in set {
        writeln!(
            out,
            "pairing {} {} {}",
            s.key(),
            clean_name(&pd.complex.name),
            pd.n
        )
        .unwrap();
    }
    for (s, pd) in set {
        for (idx, v) in pd.unit.iter().enumerate() {
            if !v.is_zero() {
                writeln!(out, "punit {} {idx} {v}", s.key()).unwrap();
            }
        }
    }
    for (s, pd) in set {
        for p in 0..=pd.n {
            for q in 0..=pd.n {
                let at = bd(p, q);
                for (r, c, v) in pd.block_at(at).entries() {
                    writeln!(out, "pblock {} {p} {q} {r} {c} {v}", s.key()).unwrap();
                }
            }
        }
    }
    writeln!(out, "end").unwrap();
}

fn write_morphism(out: &mut String, m: &CoverMorphism) {
    writeln!(out, "morphism {}", clean_name(&m.name)).unwrap();
    writeln!(out, "source {}", clean_name(&m.source.name)).unwrap();
    writeln!(out, "target {}", clean_name(&m.target.name)).unwrap();
    for (s, map) in m.pullbacks() {
        let prefix = format!("pull {}", s.key());
        write_map_entries(out, &prefix, map);
    }
    writeln!(out, "end").unwrap();
}

/// Render a bundle as text. Deterministic: equal bundles produce equal
/// bytes.
pub fn bundle_to_string(b: &ModelBundle) -> String {
    let mut out = String::new();
    writeln!(out, "bundle {}", clean_name(&b.name)).unwrap();
    let mut diagrams: BTreeMap<String, &CoverDiagram> = BTreeMap::new();
    for d in b.diagrams.values() {
        diagrams.insert(clean_name(&d.name), d);
    }
    for m in b.morphisms.values() {
        diagrams
            .entry(clean_name(&m.source.name))
            .or_insert(&m.source);
        diagrams
            .entry(clean_name(&m.target.name))
            .or_insert(&m.target);
    }
    let mut complexes: BTreeMap<String, &BigradedComplex> = BTreeMap::new();
    for d in diagrams.values() {
        for s in d.simplices() {
            if let Ok(c) = d.complex_at(s) {
                complexes.insert(clean_name(&c.name), c);
            }
        }
    }
    for m in b.models.values() {
        complexes.insert(clean_name(&m.complex.name), &m.complex);
    }
    for set in b.pairings.values() {
        for pd in set.values() {
            complexes.insert(clean_name(&pd.complex.name), &pd.complex);
        }
    }
    for c in complexes.values() {
        write_complex(&mut out, c);
    }
    for d in diagrams.values() {
        write_diagram(&mut out, d);
    }
    for m in b.models.values() {
        write_model(&mut out, m);
    }
    for (key, set) in &b.pairings {
        write_pairings(&mut out, key, set);
    }
    for m in b.morphisms.values() {
        write_morphism(&mut out, m);
    }
    for (key, value) in &b.expected {
        let value: Vec<&str> = value.split_whitespace().collect();
        writeln!(out, "expected {} {}", clean_name(key), value.join(" ")).unwrap();
    }
    out
}

// ---------------------------------------------------------------------
// reading

fn perr(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.into(),
        line,
        message: message.into(),
    }
}

fn tok<'a>(tokens: &[&'a str], idx: usize, file: &str, line: usize) -> Result<&'a str> {
    tokens
        .get(idx)
        .copied()
        .ok_or_else(|| perr(file, line, format!("missing field {idx}")))
}

fn tok_num<T: std::str::FromStr>(
    tokens: &[&str],
    idx: usize,
    file: &str,
    line: usize,
) -> Result<T> {
    let t = tok(tokens, idx, file, line)?;
    t.parse()
        .map_err(|_| perr(file, line, format!("bad number {t:?}")))
}

fn tok_scalar(tokens: &[&str], idx: usize, file: &str, line: usize) -> Result<Scalar> {
    let t = tok(tokens, idx, file, line)?;
    t.parse()
        .map_err(|e| perr(file, line, format!("bad value {t:?}: {e}")))
}

fn tok_simplex(tokens: &[&str], idx: usize, file: &str, line: usize) -> Result<Simplex> {
    let t = tok(tokens, idx, file, line)?;
    Simplex::parse_key(t).ok_or_else(|| perr(file, line, format!("bad simplex key {t:?}")))
}

fn tok_bidegree(tokens: &[&str], idx: usize, file: &str, line: usize) -> Result<Bidegree> {
    Ok(bd(
        tok_num(tokens, idx, file, line)?,
        tok_num(tokens, idx + 1, file, line)?,
    ))
}

type Triples = Vec<(usize, usize, Scalar)>;

fn push_triple(
    into: &mut BTreeMap<Bidegree, Triples>,
    tokens: &[&str],
    idx: usize,
    file: &str,
    line: usize,
) -> Result<()> {
    let at = tok_bidegree(tokens, idx, file, line)?;
    let r = tok_num(tokens, idx + 2, file, line)?;
    let c = tok_num(tokens, idx + 3, file, line)?;
    let v = tok_scalar(tokens, idx + 4, file, line)?;
    into.entry(at).or_default().push((r, c, v));
    Ok(())
}

fn blocks_into_map(
    mut map: ChainMap,
    blocks: &BTreeMap<Bidegree, Triples>,
    file: &str,
    line: usize,
    what: &str,
) -> Result<ChainMap> {
    for (&at, triples) in blocks {
        let rows = map.target.dim_at(at);
        let cols = map.source.dim_at(at);
        let m = SparseMatrix::from_triples(rows, cols, triples.clone())
            .map_err(|e| perr(file, line, format!("{what} block at {at}: {e}")))?;
        map.set_block(at, m)
            .map_err(|e| perr(file, line, format!("{what} block at {at}: {e}")))?;
    }
    Ok(map)
}

#[derive(Default)]
struct ComplexBuilder {
    start: usize,
    name: String,
    dims: Vec<(Bidegree, usize)>,
    diffs: BTreeMap<Bidegree, Triples>,
}

impl ComplexBuilder {
    fn finish(self, file: &str) -> Result<BigradedComplex> {
        let mut c = BigradedComplex::new(self.name.clone());
        for (at, dim) in self.dims {
            c.set_dim(at, dim);
        }
        for (at, triples) in self.diffs {
            let m = SparseMatrix::from_triples(c.dim_at(at.up_q()), c.dim_at(at), triples)
                .map_err(|e| {
                    perr(
                        file,
                        self.start,
                        format!("complex {}: diff at {at}: {e}", self.name),
                    )
                })?;
            c.set_diff(at, m).map_err(|e| {
                perr(
                    file,
                    self.start,
                    format!("complex {}: diff at {at}: {e}", self.name),
                )
            })?;
        }
        Ok(c)
    }
}

#[derive(Default)]
struct DiagramBuilder {
    start: usize,
    name: String,
    sets: Vec<String>,
    extensions: bool,
    simplices: Vec<Simplex>,
    pieces: Vec<(Simplex, String)>,
    restrict: BTreeMap<(Simplex, Simplex), BTreeMap<Bidegree, Triples>>,
    extend: BTreeMap<(Simplex, Simplex), BTreeMap<Bidegree, Triples>>,
}

impl DiagramBuilder {
    fn finish(
        self,
        file: &str,
        complexes: &BTreeMap<String, BigradedComplex>,
    ) -> Result<CoverDiagram> {
        let oops = |msg: String| perr(file, self.start, format!("diagram {}: {msg}", self.name));
        let mut d = CoverDiagram::new(self.name.clone(), self.sets.clone());
        for s in &self.simplices {
            d.add_simplex(s.clone());
        }
        for (s, cname) in &self.pieces {
            let c = complexes
                .get(cname)
                .ok_or_else(|| oops(format!("references missing complex {cname}")))?;
            d.set_piece(s.clone(), c.clone());
        }
        let mut seen_restrict = 0usize;
        let mut seen_extend = 0usize;
        let simplices: Vec<Simplex> = d.simplices().cloned().collect();
        for s in &simplices {
            for (_, face) in s.faces() {
                let src = d
                    .complex_at(&face)
                    .map_err(|_| oops(format!("no piece on {face}")))?
                    .clone();
                let dst = d
                    .complex_at(s)
                    .map_err(|_| oops(format!("no piece on {s}")))?
                    .clone();
                let key = (face.clone(), s.clone());
                let raw = ChainMap::new(src.clone(), dst.clone(), bd(0, 0));
                let map = match self.restrict.get(&key) {
                    Some(blocks) => {
                        seen_restrict += 1;
                        blocks_into_map(raw, blocks, file, self.start, "restriction")?
                    }
                    None => raw,
                };
                d.set_restriction(face.clone(), s.clone(), map);
                if self.extensions {
                    let raw = ChainMap::new(dst, src, bd(0, 0));
                    let map = match self.extend.get(&key) {
                        Some(blocks) => {
                            seen_extend += 1;
                            blocks_into_map(raw, blocks, file, self.start, "extension")?
                        }
                        None => raw,
                    };
                    d.set_extension(face.clone(), s.clone(), map);
                }
            }
        }
        if seen_restrict != self.restrict.len() {
            return Err(oops(
                "restriction entries name a pair that is not a face incidence".into(),
            ));
        }
        if seen_extend != self.extend.len() {
            return Err(oops(
                "extension entries name a pair that is not a face incidence".into(),
            ));
        }
        Ok(d)
    }
}

#[derive(Default)]
struct ModelBuilder {
    start: usize,
    name: String,
    complex_name: String,
    n: i32,
    unit: Vec<(usize, Scalar)>,
    with_integrate: bool,
    integrate: Vec<(usize, Scalar)>,
    with_partition: bool,
    partition: Vec<(u8, usize, Scalar)>,
    wedge: BTreeMap<(Bidegree, Bidegree), BTreeMap<usize, Triples>>,
}

impl ModelBuilder {
    fn finish(self, file: &str, complexes: &BTreeMap<String, BigradedComplex>) -> Result<DgaModel> {
        let oops = |msg: String| perr(file, self.start, format!("model {}: {msg}", self.name));
        let complex = complexes
            .get(&self.complex_name)
            .ok_or_else(|| oops(format!("references missing complex {}", self.complex_name)))?
            .clone();
        let fill = |entries: &[(usize, Scalar)], len: usize, what: &str| -> Result<Vec<Scalar>> {
            let mut v = vec![Scalar::zero(); len];
            for (idx, value) in entries {
                if *idx >= len {
                    return Err(oops(format!("{what} index {idx} out of range {len}")));
                }
                v[*idx] = value.clone();
            }
            Ok(v)
        };
        let dim00 = complex.dim_at(bd(0, 0));
        let unit = fill(&self.unit, dim00, "unit")?;
        let mut m = DgaModel::new(self.name.clone(), complex, self.n, unit);
        for ((a, b), per_left) in self.wedge {
            let dim_a = m.complex.dim_at(a);
            let dim_b = m.complex.dim_at(b);
            let dim_out = m.complex.dim_at(a + b);
            let mut tables = vec![SparseMatrix::new(dim_out, dim_b); dim_a];
            for (j, triples) in per_left {
                if j >= dim_a {
                    return Err(oops(format!(
                        "wedge table index {j} out of range at {a} x {b}"
                    )));
                }
                tables[j] = SparseMatrix::from_triples(dim_out, dim_b, triples)
                    .map_err(|e| oops(format!("wedge table at {a} x {b}: {e}")))?;
            }
            m.set_wedge(a, b, tables)
                .map_err(|e| oops(format!("wedge table at {a} x {b}: {e}")))?;
        }
        if self.with_integrate {
            let len = m.complex.dim_at(bd(self.n, self.n));
            m.integrate = Some(fill(&self.integrate, len, "integrate")?);
        }
        if self.with_partition {
            let halves: (Vec<_>, Vec<_>) = self
                .partition
                .iter()
                .cloned()
                .partition(|(half, _, _)| *half == 0);
            let rho0: Vec<(usize, Scalar)> = halves.0.into_iter().map(|(_, i, v)| (i, v)).collect();
            let rho1: Vec<(usize, Scalar)> = halves.1.into_iter().map(|(_, i, v)| (i, v)).collect();
            m.partition = Some((
                fill(&rho0, dim00, "partition")?,
                fill(&rho1, dim00, "partition")?,
            ));
        }
        Ok(m)
    }
}

#[derive(Default)]
struct PairingEntry {
    complex_name: String,
    n: i32,
    unit: Vec<(usize, Scalar)>,
    blocks: BTreeMap<Bidegree, Triples>,
}

#[derive(Default)]
struct PairingsBuilder {
    start: usize,
    key: String,
    entries: BTreeMap<Simplex, PairingEntry>,
}

impl PairingsBuilder {
    fn finish(
        self,
        file: &str,
        complexes: &BTreeMap<String, BigradedComplex>,
    ) -> Result<BTreeMap<Simplex, PairingData>> {
        let mut out = BTreeMap::new();
        for (s, entry) in self.entries {
            let oops = |msg: String| {
                perr(
                    file,
                    self.start,
                    format!("pairings {} on {s}: {msg}", self.key),
                )
            };
            let complex = complexes
                .get(&entry.complex_name)
                .ok_or_else(|| oops(format!("references missing complex {}", entry.complex_name)))?
                .clone();
            let dim00 = complex.dim_at(bd(0, 0));
            let mut unit = vec![Scalar::zero(); dim00];
            for (idx, v) in &entry.unit {
                if *idx >= dim00 {
                    return Err(oops(format!("unit index {idx} out of range {dim00}")));
                }
                unit[*idx] = v.clone();
            }
            let mut pd =
                PairingData::new(complex, entry.n, unit).map_err(|e| oops(e.to_string()))?;
            for (at, triples) in entry.blocks {
                let rows = pd.complex.dim_at(at);
                let cols = pd.complex.dim_at(bd(entry.n - at.p, entry.n - at.q));
                let m = SparseMatrix::from_triples(rows, cols, triples)
                    .map_err(|e| oops(format!("block at {at}: {e}")))?;
                pd.set_block(at, m)
                    .map_err(|e| oops(format!("block at {at}: {e}")))?;
            }
            out.insert(s, pd);
        }
        Ok(out)
    }
}

#[derive(Default)]
struct MorphismBuilder {
    start: usize,
    name: String,
    source: String,
    target: String,
    pulls: BTreeMap<Simplex, BTreeMap<Bidegree, Triples>>,
}

impl MorphismBuilder {
    fn finish(
        self,
        file: &str,
        diagrams: &BTreeMap<String, CoverDiagram>,
    ) -> Result<CoverMorphism> {
        let oops = |msg: String| perr(file, self.start, format!("morphism {}: {msg}", self.name));
        let src = diagrams
            .get(&self.source)
            .ok_or_else(|| oops(format!("references missing diagram {}", self.source)))?
            .clone();
        let tgt = diagrams
            .get(&self.target)
            .ok_or_else(|| oops(format!("references missing diagram {}", self.target)))?
            .clone();
        let mut m = CoverMorphism::new(self.name.clone(), src.clone(), tgt.clone());
        let mut seen = 0usize;
        let simplices: Vec<Simplex> = src.simplices().cloned().collect();
        for s in &simplices {
            let from = tgt
                .complex_at(s)
                .map_err(|_| oops(format!("target diagram has no piece on {s}")))?
                .clone();
            let to = src
                .complex_at(s)
                .map_err(|_| oops(format!("source diagram has no piece on {s}")))?
                .clone();
            let raw = ChainMap::new(from, to, bd(0, 0));
            let map = match self.pulls.get(s) {
                Some(blocks) => {
                    seen += 1;
                    blocks_into_map(raw, blocks, file, self.start, "pullback")?
                }
                None => raw,
            };
            m.set_pullback(s.clone(), map);
        }
        if seen != self.pulls.len() {
            return Err(oops(
                "pullback entries name a simplex outside the nerve".into(),
            ));
        }
        Ok(m)
    }
}

enum Section {
    Complex(ComplexBuilder),
    Diagram(DiagramBuilder),
    Model(ModelBuilder),
    Pairings(PairingsBuilder),
    Morphism(MorphismBuilder),
}

/// Parse a bundle from text. `file` names the source in errors.
pub fn bundle_from_str(file: &str, text: &str) -> Result<ModelBundle> {
    let mut parser = BundleParser::default();
    parser.feed(file, text)?;
    parser.finish(file)
}

/// Incremental parser state, so a bundle can arrive either as one file
/// or as a directory of member files sharing one pool of names. Every
/// section must close inside the text chunk that opened it.
#[derive(Default)]
struct BundleParser {
    bundle: ModelBundle,
    named: bool,
    complexes: BTreeMap<String, BigradedComplex>,
}

impl BundleParser {
    fn feed(&mut self, file: &str, text: &str) -> Result<()> {
        let bundle = &mut self.bundle;
        let named = &mut self.named;
        let complexes = &mut self.complexes;
        let mut section: Option<Section> = None;
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let head = tokens[0];
            if head == "end" {
                match section.take() {
                    Some(Section::Complex(b)) => {
                        let c = b.finish(file)?;
                        if complexes.insert(c.name.clone(), c).is_some() {
                            return Err(perr(file, line, "duplicate complex name"));
                        }
                    }
                    Some(Section::Diagram(b)) => {
                        let d = b.finish(file, &complexes)?;
                        if bundle.diagrams.insert(d.name.clone(), d).is_some() {
                            return Err(perr(file, line, "duplicate diagram name"));
                        }
                    }
                    Some(Section::Model(b)) => {
                        let m = b.finish(file, &complexes)?;
                        if bundle.models.insert(m.name.clone(), m).is_some() {
                            return Err(perr(file, line, "duplicate model name"));
                        }
                    }
                    Some(Section::Pairings(b)) => {
                        let key = b.key.clone();
                        let set = b.finish(file, &complexes)?;
                        if bundle.pairings.insert(key, set).is_some() {
                            return Err(perr(file, line, "duplicate pairings key"));
                        }
                    }
                    Some(Section::Morphism(b)) => {
                        let m = b.finish(file, &bundle.diagrams)?;
                        if bundle.morphisms.insert(m.name.clone(), m).is_some() {
                            return Err(perr(file, line, "duplicate morphism name"));
                        }
                    }
                    None => return Err(perr(file, line, "end outside any section")),
                }
                continue;
            }
            match &mut section {
                None => match head {
                    "bundle" => {
                        if *named {
                            return Err(perr(file, line, "second bundle line"));
                        }
                        bundle.name = tok(&tokens, 1, file, line)?.to_string();
                        *named = true;
                    }
                    "expected" => {
                        let key = tok(&tokens, 1, file, line)?.to_string();
                        if tokens.len() < 3 {
                            return Err(perr(file, line, "expected line needs a value"));
                        }
                        bundle.expected.insert(key, tokens[2..].join(" "));
                    }
                    "complex" => {
                        section = Some(Section::Complex(ComplexBuilder {
                            start: line,
                            name: tok(&tokens, 1, file, line)?.to_string(),
                            ..ComplexBuilder::default()
                        }));
                    }
                    "diagram" => {
                        section = Some(Section::Diagram(DiagramBuilder {
                            start: line,
                            name: tok(&tokens, 1, file, line)?.to_string(),
                            ..DiagramBuilder::default()
                        }));
                    }
                    "model" => {
                        section = Some(Section::Model(ModelBuilder {
                            start: line,
                            name: tok(&tokens, 1, file, line)?.to_string(),
                            ..ModelBuilder::default()
                        }));
                    }
                    "pairings" => {
                        section = Some(Section::Pairings(PairingsBuilder {
                            start: line,
                            key: tok(&tokens, 1, file, line)?.to_string(),
                            ..PairingsBuilder::default()
                        }));
                    }
                    "morphism" => {
                        section = Some(Section::Morphism(MorphismBuilder {
                            start: line,
                            name: tok(&tokens, 1, file, line)?.to_string(),
                            ..MorphismBuilder::default()
                        }));
                    }
                    other => return Err(perr(file, line, format!("unknown directive {other:?}"))),
                },
                Some(Section::Complex(b)) => match head {
                    "space" => {
                        let at = tok_bidegree(&tokens, 1, file, line)?;
                        let dim = tok_num(&tokens, 3, file, line)?;
                        b.dims.push((at, dim));
                    }
                    "diff" => push_triple(&mut b.diffs, &tokens, 1, file, line)?,
                    other => {
                        return Err(perr(file, line, format!("unknown complex line {other:?}")))
                    }
                },
                Some(Section::Diagram(b)) => match head {
                    "sets" => {
                        b.sets = tokens[1..].iter().map(|t| t.to_string()).collect();
                        if b.sets.is_empty() {
                            return Err(perr(file, line, "sets line needs labels"));
                        }
                    }
                    "extensions" => {
                        b.extensions = match tok(&tokens, 1, file, line)? {
                            "on" => true,
                            "off" => false,
                            other => {
                                return Err(perr(
                                    file,
                                    line,
                                    format!("extensions must be on or off, got {other:?}"),
                                ))
                            }
                        };
                    }
                    "simplex" => b.simplices.push(tok_simplex(&tokens, 1, file, line)?),
                    "piece" => {
                        let s = tok_simplex(&tokens, 1, file, line)?;
                        let cname = tok(&tokens, 2, file, line)?.to_string();
                        b.pieces.push((s, cname));
                    }
                    "restrict" | "extend" => {
                        let face = tok_simplex(&tokens, 1, file, line)?;
                        let s = tok_simplex(&tokens, 2, file, line)?;
                        let into = if head == "restrict" {
                            &mut b.restrict
                        } else {
                            &mut b.extend
                        };
                        push_triple(into.entry((face, s)).or_default(), &tokens, 3, file, line)?;
                    }
                    other => {
                        return Err(perr(file, line, format!("unknown diagram line {other:?}")))
                    }
                },
                Some(Section::Model(b)) => match head {
                    "complex" => b.complex_name = tok(&tokens, 1, file, line)?.to_string(),
                    "square" => b.n = tok_num(&tokens, 1, file, line)?,
                    "unit" => {
                        let idx = tok_num(&tokens, 1, file, line)?;
                        let v = tok_scalar(&tokens, 2, file, line)?;
                        b.unit.push((idx, v));
                    }
                    "with-integrate" => b.with_integrate = true,
                    "integrate" => {
                        let idx = tok_num(&tokens, 1, file, line)?;
                        let v = tok_scalar(&tokens, 2, file, line)?;
                        b.integrate.push((idx, v));
                    }
                    "with-partition" => b.with_partition = true,
                    "partition" => {
                        let half: u8 = tok_num(&tokens, 1, file, line)?;
                        if half > 1 {
                            return Err(perr(file, line, "partition half must be 0 or 1"));
                        }
                        let idx = tok_num(&tokens, 2, file, line)?;
                        let v = tok_scalar(&tokens, 3, file, line)?;
                        b.partition.push((half, idx, v));
                    }
                    "wedge" => {
                        let a = tok_bidegree(&tokens, 1, file, line)?;
                        let bb = tok_bidegree(&tokens, 3, file, line)?;
                        let j: usize = tok_num(&tokens, 5, file, line)?;
                        let r = tok_num(&tokens, 6, file, line)?;
                        let c = tok_num(&tokens, 7, file, line)?;
                        let v = tok_scalar(&tokens, 8, file, line)?;
                        b.wedge
                            .entry((a, bb))
                            .or_default()
                            .entry(j)
                            .or_default()
                            .push((r, c, v));
                    }
                    other => return Err(perr(file, line, format!("unknown model line {other:?}"))),
                },
                Some(Section::Pairings(b)) => match head {
                    "pairing" => {
                        let s = tok_simplex(&tokens, 1, file, line)?;
                        let complex_name = tok(&tokens, 2, file, line)?.to_string();
                        let n = tok_num(&tokens, 3, file, line)?;
                        b.entries.insert(
                            s,
                            PairingEntry {
                                complex_name,
                                n,
                                ..PairingEntry::default()
                            },
                        );
                    }
                    "punit" => {
                        let s = tok_simplex(&tokens, 1, file, line)?;
                        let idx = tok_num(&tokens, 2, file, line)?;
                        let v = tok_scalar(&tokens, 3, file, line)?;
                        b.entries
                            .get_mut(&s)
                            .ok_or_else(|| perr(file, line, "punit before its pairing line"))?
                            .unit
                            .push((idx, v));
                    }
                    "pblock" => {
                        let s = tok_simplex(&tokens, 1, file, line)?;
                        let entry = b
                            .entries
                            .get_mut(&s)
                            .ok_or_else(|| perr(file, line, "pblock before its pairing line"))?;
                        push_triple(&mut entry.blocks, &tokens, 2, file, line)?;
                    }
                    other => {
                        return Err(perr(file, line, format!("unknown pairings line {other:?}")))
                    }
                },
                Some(Section::Morphism(b)) => match head {
                    "source" => b.source = tok(&tokens, 1, file, line)?.to_string(),
                    "target" => b.target = tok(&tokens, 1, file, line)?.to_string(),
                    "pull" => {
                        let s = tok_simplex(&tokens, 1, file, line)?;
                        push_triple(b.pulls.entry(s).or_default(), &tokens, 2, file, line)?;
                    }
                    other => {
                        return Err(perr(file, line, format!("unknown morphism line {other:?}")))
                    }
                },
            }
        }
        if section.is_some() {
            return Err(perr(file, text.lines().count(), "unterminated section"));
        }
        Ok(())
    }

    fn finish(self, file: &str) -> Result<ModelBundle> {
        if !self.named {
            return Err(perr(file, 1, "missing bundle line"));
        }
        Ok(self.bundle)
    }
}

pub fn save_bundle(path: &Path, b: &ModelBundle) -> Result<()> {
    std::fs::write(path, bundle_to_string(b)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Write the bundle as a directory: one text file per object plus a
/// `manifest` naming the bundle and listing the member files in parse
/// order. Saving the same bundle twice writes identical bytes into every
/// file.
pub fn save_bundle_dir(dir: &Path, b: &ModelBundle) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut diagrams: BTreeMap<String, &CoverDiagram> = BTreeMap::new();
    for d in b.diagrams.values() {
        diagrams.insert(clean_name(&d.name), d);
    }
    for m in b.morphisms.values() {
        diagrams
            .entry(clean_name(&m.source.name))
            .or_insert(&m.source);
        diagrams
            .entry(clean_name(&m.target.name))
            .or_insert(&m.target);
    }
    let mut complexes: BTreeMap<String, &BigradedComplex> = BTreeMap::new();
    for d in diagrams.values() {
        for s in d.simplices() {
            if let Ok(c) = d.complex_at(s) {
                complexes.insert(clean_name(&c.name), c);
            }
        }
    }
    for m in b.models.values() {
        complexes.insert(clean_name(&m.complex.name), &m.complex);
    }
    for set in b.pairings.values() {
        for pd in set.values() {
            complexes.insert(clean_name(&pd.complex.name), &pd.complex);
        }
    }
    let mut files: Vec<(String, String)> = Vec::new();
    for (name, c) in &complexes {
        let mut text = String::new();
        write_complex(&mut text, c);
        files.push((format!("complex-{name}.txt"), text));
    }
    for (name, d) in &diagrams {
        let mut text = String::new();
        write_diagram(&mut text, d);
        files.push((format!("diagram-{name}.txt"), text));
    }
    for m in b.models.values() {
        let mut text = String::new();
        write_model(&mut text, m);
        files.push((format!("model-{}.txt", clean_name(&m.name)), text));
    }
    for (key, set) in &b.pairings {
        let mut text = String::new();
        write_pairings(&mut text, key, set);
        files.push((format!("pairings-{}.txt", clean_name(key)), text));
    }
    for m in b.morphisms.values() {
        let mut text = String::new();
        write_morphism(&mut text, m);
        files.push((format!("morphism-{}.txt", clean_name(&m.name)), text));
    }
    if !b.expected.is_empty() {
        let mut text = String::new();
        for (key, value) in &b.expected {
            let value: Vec<&str> = value.split_whitespace().collect();
            writeln!(text, "expected {} {}", clean_name(key), value.join(" ")).unwrap();
        }
        files.push(("expected.txt".into(), text));
    }
    let mut manifest = format!("bundle {}\n", clean_name(&b.name));
    for (name, _) in &files {
        writeln!(manifest, "file {name}").unwrap();
    }
    for (name, content) in files {
        let path = dir.join(&name);
        std::fs::write(&path, content).map_err(io_err(&path))?;
    }
    let mpath = dir.join("manifest");
    std::fs::write(&mpath, manifest).map_err(io_err(&mpath))
}

/// Load a bundle from a directory written by `save_bundle_dir`: the
/// manifest supplies the bundle name and the member files, which are
/// parsed in order into one shared pool of names.
pub fn load_bundle_dir(dir: &Path) -> Result<ModelBundle> {
    let mpath = dir.join("manifest");
    let mfile = mpath.display().to_string();
    let text = std::fs::read_to_string(&mpath).map_err(io_err(&mpath))?;
    let mut parser = BundleParser::default();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "bundle" => {
                if parser.named {
                    return Err(perr(&mfile, line, "second bundle line"));
                }
                parser.bundle.name = tok(&tokens, 1, &mfile, line)?.to_string();
                parser.named = true;
            }
            "file" => {
                let name = tok(&tokens, 1, &mfile, line)?;
                if name.contains('/') || name.contains('\\') || name.contains("..") {
                    return Err(perr(&mfile, line, "file name escapes the bundle directory"));
                }
                let path = dir.join(name);
                let content = std::fs::read_to_string(&path).map_err(io_err(&path))?;
                parser.feed(&path.display().to_string(), &content)?;
            }
            other => {
                return Err(perr(
                    &mfile,
                    line,
                    format!("unknown manifest line {other:?}"),
                ))
            }
        }
    }
    parser.finish(&mfile)
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    bundle_from_str(&path.display().to_string(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin_bundle;

    #[test]
    fn builtin_bundles_round_trip_byte_identically() {
        for spec in [
            "torus:1",
            "torus:2",
            "sheets:2",
            "blowup:2",
            "blowup:5",
            "random:2",
            "random:3",
            "nilpotent",
        ] {
            let b = builtin_bundle(spec).unwrap();
            let first = bundle_to_string(&b);
            let reloaded = bundle_from_str("mem", &first).unwrap_or_else(|e| panic!("{spec}: {e}"));
            let second = bundle_to_string(&reloaded);
            assert_eq!(first, second, "{spec}");
        }
    }

    #[test]
    fn reloaded_objects_still_pass_their_checks() {
        let b = builtin_bundle("sheets:2").unwrap();
        let text = bundle_to_string(&b);
        let reloaded = bundle_from_str("mem", &text).unwrap();
        for d in reloaded.diagrams.values() {
            d.check().unwrap();
        }
        for m in reloaded.morphisms.values() {
            m.check().unwrap();
        }
        let b = builtin_bundle("nilpotent").unwrap();
        let reloaded = bundle_from_str("mem", &bundle_to_string(&b)).unwrap();
        let model = &reloaded.models["nilpotent"];
        model.check().unwrap();
        assert!(model.partition.is_some());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "bundle demo\ncomplex c\nspace 0 0 one\nend\n";
        match bundle_from_str("demo.txt", text) {
            Err(Error::Parse { file, line, .. }) => {
                assert_eq!(file, "demo.txt");
                assert_eq!(line, 3);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "bundle demo\ndiagram d\nsets A B\n";
        assert!(matches!(
            bundle_from_str("demo.txt", text),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle.txt");
        let b = builtin_bundle("blowup:3").unwrap();
        save_bundle(&path, &b).unwrap();
        let reloaded = load_bundle(&path).unwrap();
        assert_eq!(bundle_to_string(&b), bundle_to_string(&reloaded));
        let m = &reloaded.morphisms["blowup3"];
        m.check().unwrap();
    }

    #[test]
    fn directories_round_trip_byte_identically() {
        let tmp = tempfile::tempdir().unwrap();
        let first = tmp.path().join("first");
        let second = tmp.path().join("second");
        let b = builtin_bundle("sheets:2").unwrap();
        save_bundle_dir(&first, &b).unwrap();
        let reloaded = load_bundle_dir(&first).unwrap();
        assert_eq!(bundle_to_string(&b), bundle_to_string(&reloaded));
        save_bundle_dir(&second, &reloaded).unwrap();
        let manifest = std::fs::read_to_string(first.join("manifest")).unwrap();
        assert_eq!(
            manifest,
            std::fs::read_to_string(second.join("manifest")).unwrap()
        );
        for line in manifest.lines().skip(1) {
            let name = line.strip_prefix("file ").unwrap();
            assert_eq!(
                std::fs::read(first.join(name)).unwrap(),
                std::fs::read(second.join(name)).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn manifest_rejects_escaping_file_names() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(tmp.path().join("manifest"), "bundle x\nfile ../evil.txt\n").unwrap();
        assert!(matches!(
            load_bundle_dir(tmp.path()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\nbundle demo\n\ncomplex c # trailing\nspace 0 0 2\nend\n";
        let b = bundle_from_str("mem", text).unwrap();
        assert_eq!(b.name, "demo");
    }
}
