//! Symbolic triple-scattering diagrams.
//!
//! Every atom of a chain carries one composite block. A composite block with
//! n incoming arrows expands into 2ⁿ elastic terms (the incoming arrows split
//! between a σ⁺ circle, which emits the atom's dashed arrow, and a σ⁻ circle,
//! which emits its solid arrow) plus one inelastic box emitting both arrows.
//! Terms are wired into diagrams, closed loops are discarded and all arrow
//! frequencies are resolved exactly in terms of ν and integration variables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CbsError, Result};
use crate::response::Sign;

/// Arrow type: solid carries a positive-frequency amplitude, dashed a negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Character {
    Solid,
    Dashed,
}

impl Character {
    /// Sign of the probe an incoming arrow of this type represents.
    pub fn sign(self) -> Sign {
        match self {
            Character::Solid => Sign::Minus,
            Character::Dashed => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl BlockId {
    pub fn letter(self) -> char {
        match self {
            BlockId::A => 'a',
            BlockId::B => 'b',
            BlockId::C => 'c',
            BlockId::D => 'd',
            BlockId::E => 'e',
            BlockId::F => 'f',
            BlockId::G => 'g',
        }
    }

    /// Incoming arrow types in the order used by the split masks below.
    pub fn incoming(self) -> &'static [Character] {
        use Character::*;
        match self {
            BlockId::A => &[],
            BlockId::B | BlockId::F => &[Dashed, Solid],
            BlockId::C => &[Dashed],
            BlockId::D => &[Solid],
            BlockId::E => &[Dashed, Solid, Dashed, Solid],
            BlockId::G => &[Solid, Dashed, Dashed],
        }
    }

    /// Elastic terms in figure-label order, each given as the mask of incoming
    /// arrows absorbed by the σ⁺ circle.
    fn split_masks(self) -> Vec<u8> {
        match self {
            BlockId::A => vec![0b0],
            // Bit 0: dashed arrow, bit 1: solid arrow.
            BlockId::B | BlockId::F => vec![0b00, 0b11, 0b01, 0b10],
            BlockId::C => vec![0b1, 0b0],
            BlockId::D => vec![0b0, 0b1],
            // Bit 0: solid from atom 1, bit 1: dashed from atom 1, bit 2: dashed from atom 3.
            BlockId::G => vec![0b111, 0b110, 0b101, 0b011, 0b010, 0b001, 0b100, 0b000],
            // Bits: dashed 1, solid 1, dashed 3, solid 3. The four splits that
            // survive at lowest order in Ω occupy labels e6, e7, e13, e16.
            BlockId::E => {
                let special = [(6usize, 0b0001u8), (7, 0b0100), (13, 0b0111), (16, 0b1101)];
                let mut rest = (0u8..16).filter(|m| !special.iter().any(|s| s.1 == *m));
                (1..=16)
                    .map(|label| match special.iter().find(|s| s.0 == label) {
                        Some(s) => s.1,
                        None => rest.next().expect("sixteen masks"),
                    })
                    .collect()
            }
        }
    }
}

/// One elementary term of a composite block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    /// Two circles; the mask lists incoming arrows taken by the σ⁺ circle.
    Split(u8),
    /// Inelastic box.
    Box,
}

/// Term of a composite block with its figure label, e.g. (g9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockTerm {
    pub block: BlockId,
    pub index: usize,
    pub kind: TermKind,
}

impl fmt::Display for BlockTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{})", self.block.letter(), self.index)
    }
}

/// Composite block with its full term list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositeBlock {
    pub id: BlockId,
    pub terms: Vec<BlockTerm>,
}

/// Expansion of a composite block into elementary terms.
pub fn expand_block(id: BlockId) -> CompositeBlock {
    let mut terms: Vec<BlockTerm> = id
        .split_masks()
        .into_iter()
        .enumerate()
        .map(|(k, m)| BlockTerm { block: id, index: k + 1, kind: TermKind::Split(m) })
        .collect();
    terms.push(BlockTerm { block: id, index: terms.len() + 1, kind: TermKind::Box });
    CompositeBlock { id, terms }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContributionType {
    L1,
    L2,
    C1,
    C2,
}

/// Where an arrow ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    Atom(usize),
    Detector,
}

/// Inter-atomic or detected arrow of a contribution type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub character: Character,
    pub from: usize,
    pub to: Target,
}

/// Arrow topology of one atom: incoming arrows in the block's mask order and
/// the ids of its solid and dashed outgoing arrows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomPorts {
    pub block: BlockId,
    pub incoming: Vec<usize>,
    pub solid_out: usize,
    pub dashed_out: usize,
}

/// Static wiring of a contribution type; atoms are numbered 1, 2, 3 and
/// stored at positions 0, 1, 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub arrows: Vec<Arrow>,
    pub atoms: [AtomPorts; 3],
}

impl ContributionType {
    pub const ALL: [ContributionType; 4] =
        [ContributionType::L1, ContributionType::L2, ContributionType::C1, ContributionType::C2];

    pub fn name(self) -> &'static str {
        match self {
            ContributionType::L1 => "L1",
            ContributionType::L2 => "L2",
            ContributionType::C1 => "C1",
            ContributionType::C2 => "C2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CbsError::Config(format!("unknown contribution type {s:?}")))
    }

    /// Configuration-average multiplicity; C2 additionally takes twice the real part.
    pub fn degeneracy(self) -> f64 {
        match self {
            ContributionType::L1 => 6.0,
            ContributionType::L2 => 3.0,
            ContributionType::C1 => 6.0,
            ContributionType::C2 => 12.0,
        }
    }

    pub fn is_crossed(self) -> bool {
        matches!(self, ContributionType::C1 | ContributionType::C2)
    }

    pub fn block_chain(self) -> [BlockId; 3] {
        use BlockId::*;
        match self {
            ContributionType::L1 => [A, B, B],
            ContributionType::L2 => [A, E, A],
            ContributionType::C1 => [C, F, D],
            ContributionType::C2 => [A, G, D],
        }
    }

    pub fn topology(self) -> Topology {
        use Character::*;
        let ar = |character, from, to| Arrow { character, from, to };
        let at = |k: usize| Target::Atom(k);
        let det = Target::Detector;
        let ports = |block, incoming: &[usize], solid_out, dashed_out| AtomPorts {
            block,
            incoming: incoming.to_vec(),
            solid_out,
            dashed_out,
        };
        use BlockId::*;
        match self {
            ContributionType::L1 => Topology {
                arrows: vec![
                    ar(Solid, 1, at(2)),
                    ar(Dashed, 1, at(2)),
                    ar(Solid, 2, at(3)),
                    ar(Dashed, 2, at(3)),
                    ar(Solid, 3, det),
                    ar(Dashed, 3, det),
                ],
                atoms: [ports(A, &[], 0, 1), ports(B, &[1, 0], 2, 3), ports(B, &[3, 2], 4, 5)],
            },
            ContributionType::L2 => Topology {
                arrows: vec![
                    ar(Solid, 1, at(2)),
                    ar(Dashed, 1, at(2)),
                    ar(Solid, 3, at(2)),
                    ar(Dashed, 3, at(2)),
                    ar(Solid, 2, det),
                    ar(Dashed, 2, det),
                ],
                atoms: [ports(A, &[], 0, 1), ports(E, &[1, 0, 3, 2], 4, 5), ports(A, &[], 2, 3)],
            },
            ContributionType::C1 => Topology {
                arrows: vec![
                    ar(Solid, 1, at(2)),
                    ar(Dashed, 2, at(1)),
                    ar(Solid, 2, at(3)),
                    ar(Dashed, 3, at(2)),
                    ar(Dashed, 1, det),
                    ar(Solid, 3, det),
                ],
                atoms: [ports(C, &[1], 0, 4), ports(F, &[3, 0], 2, 1), ports(D, &[2], 5, 3)],
            },
            ContributionType::C2 => Topology {
                arrows: vec![
                    ar(Solid, 1, at(2)),
                    ar(Dashed, 1, at(2)),
                    ar(Solid, 2, at(3)),
                    ar(Dashed, 3, at(2)),
                    ar(Dashed, 2, det),
                    ar(Solid, 3, det),
                ],
                atoms: [ports(A, &[], 0, 1), ports(G, &[0, 1, 3], 2, 4), ports(D, &[2], 5, 3)],
            },
        }
    }
}

/// Integer linear form c₀·ν + Σ cₖ·uₖ over the free variables of a diagram.
/// Slot 0 is ν; slots 1.. are integration variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinearForm(pub Vec<i64>);

impl LinearForm {
    pub fn eval(&self, nu: f64, vars: &[f64]) -> f64 {
        let mut acc = self.0[0] as f64 * nu;
        for (c, v) in self.0[1..].iter().zip(vars) {
            acc += *c as f64 * v;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0)
    }

    fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (c, n) in self.0.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            s.push_str(&format!("{sign}{mag}{n}"));
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

/// Resolved frequencies of one atom's factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomFactor {
    pub term: BlockTerm,
    /// Incoming probes: type and frequency.
    pub probes: Vec<(Character, LinearForm)>,
    /// For a box, the frequency of its dashed output.
    pub box_nu: Option<LinearForm>,
}

/// One composed triple-scattering term with resolved frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramTerm {
    pub ty: ContributionType,
    pub blocks: [BlockTerm; 3],
    /// Frequency of every arrow of the topology.
    pub arrow_freqs: Vec<LinearForm>,
    pub factors: [AtomFactor; 3],
    /// True when the detected arrows sit at the laser frequency (δ(ν) term).
    pub elastic: bool,
    /// Number of integration variables besides ν.
    pub n_vars: usize,
}

impl DiagramTerm {
    pub fn label(&self) -> String {
        label_of(&self.blocks)
    }

    pub fn has_box(&self) -> bool {
        self.blocks.iter().any(|b| b.kind == TermKind::Box)
    }

    pub fn is_all_box(&self) -> bool {
        self.blocks.iter().all(|b| b.kind == TermKind::Box)
    }

    /// Human-readable integrand, e.g. P(ω1)·P[-++](ω1,ω1,0;ν)·…
    pub fn describe(&self) -> String {
        let mut names = vec!["ν".to_string()];
        names.extend((1..=self.n_vars).map(|k| format!("w{k}")));
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| {
                let args = |sel: &dyn Fn(Character) -> bool| -> (String, String) {
                    let ps: Vec<_> = f.probes.iter().filter(|p| sel(p.0)).collect();
                    let signs: String = ps.iter().map(|p| if p.0 == Character::Dashed { '+' } else { '-' }).collect();
                    let freqs: Vec<String> = ps.iter().map(|p| p.1.render(&names)).collect();
                    (signs, freqs.join(","))
                };
                match f.term.kind {
                    TermKind::Box => {
                        let (s, w) = args(&|_| true);
                        let nu = f.box_nu.as_ref().expect("box frequency").render(&names);
                        if w.is_empty() {
                            format!("P({nu})")
                        } else {
                            format!("P[{s}]({w};{nu})")
                        }
                    }
                    TermKind::Split(mask) => {
                        let plus: Vec<_> = f.probes.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|x| x.1).collect();
                        let minus: Vec<_> = f.probes.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 0).map(|x| x.1).collect();
                        let fmt_circle = |name: &str, ps: &[&(Character, LinearForm)]| {
                            if ps.is_empty() {
                                format!("<{name}>0")
                            } else {
                                let s: String = ps.iter().map(|p| if p.0 == Character::Dashed { '+' } else { '-' }).collect();
                                let w: Vec<String> = ps.iter().map(|p| p.1.render(&names)).collect();
                                format!("<{name}({})>[{s}]", w.join(","))
                            }
                        };
                        format!("{}{}", fmt_circle("s+", &plus), fmt_circle("s-", &minus))
                    }
                }
            })
            .collect();
        parts.join("·")
    }
}

pub fn label_of(blocks: &[BlockTerm; 3]) -> String {
    blocks.iter().map(|b| b.to_string()).collect()
}

/// Elementary node of the amplitude-flow graph: (atom position, node kind).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Box(usize),
    PlusCircle(usize),
    MinusCircle(usize),
}

fn node_index(n: Node) -> usize {
    match n {
        Node::Box(a) => 3 * a,
        Node::PlusCircle(a) => 3 * a + 1,
        Node::MinusCircle(a) => 3 * a + 2,
    }
}

fn emitter(topo: &Topology, blocks: &[BlockTerm; 3], arrow: usize) -> Node {
    let a = topo.arrows[arrow].from - 1;
    match blocks[a].kind {
        TermKind::Box => Node::Box(a),
        TermKind::Split(_) => {
            if topo.arrows[arrow].character == Character::Dashed {
                Node::PlusCircle(a)
            } else {
                Node::MinusCircle(a)
            }
        }
    }
}

fn receiver(topo: &Topology, blocks: &[BlockTerm; 3], arrow: usize) -> Option<Node> {
    let Target::Atom(k) = topo.arrows[arrow].to else { return None };
    let a = k - 1;
    match blocks[a].kind {
        TermKind::Box => Some(Node::Box(a)),
        TermKind::Split(mask) => {
            let slot = topo.atoms[a].incoming.iter().position(|x| *x == arrow).expect("arrow wired to its target");
            Some(if mask >> slot & 1 == 1 { Node::PlusCircle(a) } else { Node::MinusCircle(a) })
        }
    }
}

/// True when amplitude circulates in a cycle from which no detected arrow can
/// be reached.
pub fn detect_closed_loop(ty: ContributionType, blocks: &[BlockTerm; 3]) -> bool {
    let topo = ty.topology();
    let n = 9;
    let mut adj = vec![Vec::new(); n];
    let mut detects = vec![false; n];
    for (k, arrow) in topo.arrows.iter().enumerate() {
        let from = node_index(emitter(&topo, blocks, k));
        match receiver(&topo, blocks, k) {
            Some(to) => adj[from].push(node_index(to)),
            None => detects[from] = true,
        }
        let _ = arrow;
    }
    // Nodes from which a detected arrow is reachable.
    let mut reach = detects.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for u in 0..n {
            if !reach[u] && adj[u].iter().any(|v| reach[*v]) {
                reach[u] = true;
                changed = true;
            }
        }
    }
    // A node lies on a cycle if it can reach itself.
    (0..n).any(|start| {
        if reach[start] {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = adj[start].clone();
        while let Some(u) = stack.pop() {
            if u == start {
                return true;
            }
            if !seen[u] {
                seen[u] = true;
                stack.extend(adj[u].iter().copied());
            }
        }
        false
    })
}

/// Exact rational for the frequency solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Q(i64, i64);

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    fn new(n: i64, d: i64) -> Q {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q(s * n / g, s * d / g)
    }
    fn zero(self) -> bool {
        self.0 == 0
    }
    fn sub(self, o: Q) -> Q {
        Q::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.0 * o.0, self.1 * o.1)
    }
    fn div(self, o: Q) -> Q {
        Q::new(self.0 * o.1, self.1 * o.0)
    }
}

/// Resolves every arrow frequency of a wired diagram.
pub fn assign_frequencies(ty: ContributionType, blocks: [BlockTerm; 3]) -> Result<DiagramTerm> {
    let topo = ty.topology();
    let n_arrows = topo.arrows.len();
    let boxes: Vec<usize> = (0..3).filter(|a| blocks[*a].kind == TermKind::Box).collect();
    // Columns: arrows, box variables (last box first), ν.
    let n_cols = n_arrows + boxes.len() + 1;
    let box_col = |b: usize| n_arrows + (boxes.len() - 1 - boxes.iter().position(|x| *x == b).expect("box atom"));
    let nu_col = n_cols - 1;
    let sgn = |arrow: usize| match topo.arrows[arrow].character {
        Character::Dashed => 1i64,
        Character::Solid => -1i64,
    };
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for a in 0..3 {
        let ports = &topo.atoms[a];
        match blocks[a].kind {
            TermKind::Split(mask) => {
                let mut plus = vec![0; n_cols];
                let mut minus = vec![0; n_cols];
                plus[ports.dashed_out] = 1;
                minus[ports.solid_out] = 1;
                for (slot, arrow) in ports.incoming.iter().enumerate() {
                    if mask >> slot & 1 == 1 {
                        plus[*arrow] -= sgn(*arrow);
                    } else {
                        minus[*arrow] += sgn(*arrow);
                    }
                }
                rows.push(plus);
                rows.push(minus);
            }
            TermKind::Box => {
                let mut dashed = vec![0; n_cols];
                dashed[ports.dashed_out] = 1;
                dashed[box_col(a)] = -1;
                let mut solid = vec![0; n_cols];
                solid[ports.solid_out] = 1;
                solid[box_col(a)] = -1;
                for arrow in &ports.incoming {
                    solid[*arrow] += sgn(*arrow);
                }
                rows.push(dashed);
                rows.push(solid);
            }
        }
    }
    for (k, arrow) in topo.arrows.iter().enumerate() {
        if arrow.to == Target::Detector {
            let mut r = vec![0; n_cols];
            r[k] = 1;
            r[nu_col] = -1;
            rows.push(r);
        }
    }
    // Reduced row echelon form over the rationals.
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|x| Q::new(*x, 1)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n_cols {
        let Some(p) = (row..m.len()).find(|r| !m[*r][col].zero()) else { continue };
        m.swap(row, p);
        let pv = m[row][col];
        for x in m[row].iter_mut() {
            *x = x.div(pv);
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].zero() {
                let f = m[r][col];
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x = x.sub(f.mul(y));
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n_cols).filter(|c| !pivots.contains(c)).collect();
    let elastic = pivots.contains(&nu_col);
    // Parameter slots: 0 = ν (when free), then the remaining free columns.
    let int_vars: Vec<usize> = free.iter().copied().filter(|c| *c != nu_col).collect();
    let slot_of = |c: usize| -> usize {
        if c == nu_col {
            0
        } else {
            1 + int_vars.iter().position(|x| *x == c).expect("free column")
        }
    };
    let n_slots = 1 + int_vars.len();
    let form_of = |col: usize| -> Result<LinearForm> {
        let mut f = vec![0i64; n_slots];
        if let Some(pr) = pivots.iter().position(|p| *p == col) {
            for c in &free {
                let q = m[pr][*c];
                if q.zero() {
                    continue;
                }
                if q.1 != 1 {
                    return Err(CbsError::Internal(format!("non-integer frequency coefficient in {}", label_of(&blocks))));
                }
                f[slot_of(*c)] -= q.0;
            }
        } else {
            f[slot_of(col)] = 1;
        }
        Ok(LinearForm(f))
    };
    let arrow_freqs = (0..n_arrows).map(form_of).collect::<Result<Vec<_>>>()?;
    let factors = [0, 1, 2].map(|a| AtomFactor {
        term: blocks[a],
        probes: topo.atoms[a].incoming.iter().map(|k| (topo.arrows[*k].character, arrow_freqs[*k].clone())).collect(),
        box_nu: (blocks[a].kind == TermKind::Box).then(|| arrow_freqs[topo.atoms[a].dashed_out].clone()),
    });
    let term = DiagramTerm { ty, blocks, arrow_freqs, factors, elastic, n_vars: int_vars.len() };
    for (k, arrow) in topo.arrows.iter().enumerate() {
        if arrow.to == Target::Detector {
            let f = &term.arrow_freqs[k];
            let ok = if elastic { f.is_zero() } else { f.0[0] == 1 && f.0[1..].iter().all(|c| *c == 0) };
            if !ok {
                return Err(CbsError::Internal(format!("detected arrow not pinned in {}", term.label())));
            }
        }
    }
    Ok(term)
}

/// All wired terms of a contribution type before the loop filter.
pub fn raw_terms(ty: ContributionType) -> Vec<[BlockTerm; 3]> {
    let chain = ty.block_chain().map(expand_block);
    let mut out = Vec::new();
    for a in &chain[0].terms {
        for b in &chain[1].terms {
            for c in &chain[2].terms {
                out.push([*a, *b, *c]);
            }
        }
    }
    out
}

/// Labels of the closed-loop terms of a contribution type.
pub fn forbidden_labels(ty: ContributionType) -> Vec<String> {
    raw_terms(ty).iter().filter(|b| detect_closed_loop(ty, b)).map(label_of).collect()
}

/// Allowed, frequency-resolved terms of a contribution type.
pub fn enumerate_type(ty: ContributionType) -> Result<Vec<DiagramTerm>> {
    raw_terms(ty)
        .into_iter()
        .filter(|b| !detect_closed_loop(ty, b))
        .map(|b| assign_frequencies(ty, b))
        .collect()
}

/// Looks up a term by label such as "(a2)(g9)(d1)".
pub fn find_term(ty: ContributionType, label: &str) -> Result<DiagramTerm> {
    let blocks = raw_terms(ty)
        .into_iter()
        .find(|b| label_of(b) == label)
        .ok_or_else(|| CbsError::Config(format!("no term {label} in {}", ty.name())))?;
    assign_frequencies(ty, blocks)
}

/// Raw and allowed term counts of every contribution type.
pub const EXPECTED_COUNTS: [(ContributionType, usize, usize); 4] = [
    (ContributionType::L1, 50, 50),
    (ContributionType::L2, 68, 68),
    (ContributionType::C1, 45, 32),
    (ContributionType::C2, 54, 46),
];

/// Closed-loop terms of the first crossed type.
pub const EXPECTED_FORBIDDEN_C1: [&str; 13] = [
    "(c1)(f1)(d2)",
    "(c1)(f4)(d2)",
    "(c2)(f1)(d2)",
    "(c2)(f2)(d1)",
    "(c2)(f2)(d2)",
    "(c2)(f2)(d3)",
    "(c2)(f3)(d2)",
    "(c2)(f4)(d1)",
    "(c2)(f4)(d2)",
    "(c2)(f4)(d3)",
    "(c2)(f5)(d2)",
    "(c3)(f1)(d2)",
    "(c3)(f4)(d2)",
];

/// Closed-loop terms of the second crossed type.
pub const EXPECTED_FORBIDDEN_C2: [&str; 8] = [
    "(a1)(g4)(d2)",
    "(a1)(g5)(d2)",
    "(a1)(g6)(d2)",
    "(a1)(g8)(d2)",
    "(a2)(g4)(d2)",
    "(a2)(g5)(d2)",
    "(a2)(g6)(d2)",
    "(a2)(g8)(d2)",
];

/// Count and forbidden-list check of one contribution type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub ty: ContributionType,
    pub raw: usize,
    pub allowed: usize,
    pub expected_raw: usize,
    pub expected_allowed: usize,
    pub forbidden: Vec<String>,
    pub forbidden_matches: bool,
}

/// Result of checking the whole catalog against the expected counts and lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogReport {
    pub entries: Vec<CatalogEntry>,
    pub ok: bool,
}

/// Compares enumerated counts and forbidden lists with the expected fixtures.
pub fn validate_catalog() -> Result<CatalogReport> {
    let mut entries = Vec::new();
    for (ty, expected_raw, expected_allowed) in EXPECTED_COUNTS {
        let mut forbidden = forbidden_labels(ty);
        forbidden.sort();
        let mut expected: Vec<String> = match ty {
            ContributionType::C1 => EXPECTED_FORBIDDEN_C1.iter().map(|s| s.to_string()).collect(),
            ContributionType::C2 => EXPECTED_FORBIDDEN_C2.iter().map(|s| s.to_string()).collect(),
            _ => Vec::new(),
        };
        expected.sort();
        entries.push(CatalogEntry {
            ty,
            raw: raw_terms(ty).len(),
            allowed: enumerate_type(ty)?.len(),
            expected_raw,
            expected_allowed,
            forbidden_matches: forbidden == expected,
            forbidden,
        });
    }
    let ok = entries
        .iter()
        .all(|e| e.raw == e.expected_raw && e.allowed == e.expected_allowed && e.forbidden_matches);
    Ok(CatalogReport { entries, ok })
}
