//! The probability flow diagram and its preference basis.
//!
//! Nodes are the `2^n` menus; every contour pair `(x, A)` is an edge
//! `A -> A \ {x}`. The appended diagram adds one edge `∅ -> X`, which closes
//! every descending path into a circuit. Minimal circuits (those that use
//! the appended edge once) are exactly the preferences.
//!
//! [`spanning_tree`] builds a tree whose links all follow edge direction, and
//! [`preference_basis`] closes each non-tree edge into a minimal circuit,
//! producing a maximal identified model.

use std::sync::Arc;

use crate::lattice::{Menu, PairIndex};
use crate::limits::Limits;
use crate::preference::{ContourPair, Preference};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    /// `A -> A \ {x}`.
    Contour(ContourPair),
    /// `∅ -> X`.
    Appended,
}

impl Edge {
    pub fn tail(self, full: Menu) -> Menu {
        match self {
            Edge::Contour(p) => p.menu,
            Edge::Appended => {
                let _ = full;
                Menu::EMPTY
            }
        }
    }

    pub fn head(self, full: Menu) -> Menu {
        match self {
            Edge::Contour(p) => p.head(),
            Edge::Appended => full,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowDiagram {
    index: Arc<PairIndex>,
    appended: bool,
}

impl FlowDiagram {
    pub fn build(n: usize, appended: bool) -> Result<Self> {
        FlowDiagram::build_with(n, appended, &Limits::default())
    }

    pub fn build_with(n: usize, appended: bool, limits: &Limits) -> Result<Self> {
        limits.check_lattice(n)?;
        Ok(FlowDiagram {
            index: PairIndex::new(n)?,
            appended,
        })
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn is_appended(&self) -> bool {
        self.appended
    }

    pub fn index(&self) -> &Arc<PairIndex> {
        &self.index
    }

    pub fn full(&self) -> Menu {
        self.index.full_menu()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Menu> {
        (0u32..1 << self.n()).map(Menu::from_bits)
    }

    /// Edges in coordinate order, the appended edge last.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.index
            .pairs()
            .iter()
            .map(|&p| Edge::Contour(p))
            .chain(self.appended.then_some(Edge::Appended))
    }

    pub fn node_count(&self) -> usize {
        self.nodes().count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Coordinate of an edge in indicator vectors.
    pub fn edge_position(&self, edge: Edge) -> usize {
        match edge {
            Edge::Contour(p) => self.index.position(p),
            Edge::Appended => self.index.len(),
        }
    }

    pub fn has_edge(&self, edge: Edge) -> bool {
        match edge {
            Edge::Contour(p) => p.menu.contains(p.x) && p.menu.is_subset_of(self.full()),
            Edge::Appended => self.appended,
        }
    }

    /// `E - N + 1`, counted from the graph itself.
    pub fn cyclomatic_number(&self) -> Result<usize> {
        if !self.appended {
            return Err(Error::NeedsAppendedDiagram);
        }
        Ok(self.edge_count() + 1 - self.node_count())
    }
}

/// A closed directed walk, listed from the edge leaving `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    edges: Vec<Edge>,
}

impl Circuit {
    /// Checks that consecutive edges chain head to tail and the walk closes.
    pub fn new(edges: Vec<Edge>, full: Menu) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::MalformedCircuit("no edges".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if let Edge::Contour(p) = e {
                if !p.menu.contains(p.x) || !p.menu.is_subset_of(full) {
                    return Err(Error::MalformedCircuit(format!(
                        "edge {i} is not a diagram edge"
                    )));
                }
            }
            let next = edges[(i + 1) % edges.len()];
            if e.head(full) != next.tail(full) {
                return Err(Error::MalformedCircuit(format!(
                    "edge {i} does not connect to edge {}",
                    (i + 1) % edges.len()
                )));
            }
        }
        Ok(Circuit { edges })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// 0/1 indicator over the appended diagram's edge coordinates.
    pub fn indicator(&self, diagram: &FlowDiagram) -> Vec<u32> {
        let mut v = vec![0; diagram.edge_count()];
        for &e in &self.edges {
            v[diagram.edge_position(e)] += 1;
        }
        v
    }
}

/// The circuit `X -> ... -> ∅ -> X` traced by a preference.
pub fn preference_to_circuit(pref: &Preference, diagram: &FlowDiagram) -> Result<Circuit> {
    if pref.len() != diagram.n() {
        return Err(Error::UniverseMismatch {
            expected: diagram.n(),
            found: pref.len(),
        });
    }
    if !diagram.is_appended() {
        return Err(Error::NeedsAppendedDiagram);
    }
    let mut edges: Vec<Edge> = pref
        .upper_contour_pairs()
        .into_iter()
        .map(Edge::Contour)
        .collect();
    edges.push(Edge::Appended);
    Circuit::new(edges, diagram.full())
}

/// Inverse of [`preference_to_circuit`] for minimal circuits.
pub fn circuit_to_preference(circuit: &Circuit, diagram: &FlowDiagram) -> Result<Preference> {
    let appended = circuit
        .edges
        .iter()
        .filter(|e| matches!(e, Edge::Appended))
        .count();
    if appended != 1 {
        return Err(Error::NonMinimalCircuit(appended));
    }
    let start = circuit
        .edges
        .iter()
        .position(|e| matches!(e, Edge::Appended))
        .unwrap();
    let len = circuit.edges.len();
    let ranking = (1..len)
        .map(|k| match circuit.edges[(start + k) % len] {
            Edge::Contour(p) => Ok(p.x),
            Edge::Appended => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    if ranking.len() != diagram.n() {
        return Err(Error::MalformedCircuit(
            "circuit does not visit every level".into(),
        ));
    }
    Preference::from_ranking(ranking)
}

/// A link from a node to its parent: `edge` runs from `parent` to the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeLink {
    pub parent: Menu,
    pub edge: Edge,
}

/// Parent links indexed by node bitmask, rooted at `∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    parents: Vec<Option<TreeLink>>,
}

impl SpanningTree {
    pub fn from_links(parents: Vec<Option<TreeLink>>) -> Self {
        SpanningTree { parents }
    }

    pub fn link(&self, node: Menu) -> Option<TreeLink> {
        self.parents.get(node.bits() as usize).copied().flatten()
    }

    pub fn links(&self) -> &[Option<TreeLink>] {
        &self.parents
    }

    pub fn links_mut(&mut self) -> &mut Vec<Option<TreeLink>> {
        &mut self.parents
    }

    pub fn link_count(&self) -> usize {
        self.parents.iter().flatten().count()
    }

    pub fn contains_edge(&self, edge: Edge, full: Menu) -> bool {
        self.link(edge.head(full)).is_some_and(|l| l.edge == edge)
    }
}

/// Connects `∅ -> X`, then sweeps levels from `|A| = n` down to 1 (menus by
/// ascending bitmask, removed element ascending) and adds `A -> B` whenever
/// `B` is not yet connected.
pub fn spanning_tree(diagram: &FlowDiagram) -> Result<SpanningTree> {
    if !diagram.is_appended() {
        return Err(Error::NeedsAppendedDiagram);
    }
    let n = diagram.n();
    let full = diagram.full();
    let mut parents: Vec<Option<TreeLink>> = vec![None; 1 << n];
    let mut connected = vec![false; 1 << n];
    connected[0] = true;
    connected[full.bits() as usize] = true;
    parents[full.bits() as usize] = Some(TreeLink {
        parent: Menu::EMPTY,
        edge: Edge::Appended,
    });
    for level in (1..=n).rev() {
        for menu in diagram.nodes().filter(|m| m.len() == level) {
            for x in menu.iter() {
                let child = menu.without(x);
                if !connected[child.bits() as usize] {
                    connected[child.bits() as usize] = true;
                    parents[child.bits() as usize] = Some(TreeLink {
                        parent: menu,
                        edge: Edge::Contour(ContourPair { x, menu }),
                    });
                }
            }
        }
    }
    Ok(SpanningTree { parents })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    /// Node without a parent link (other than the root).
    Unspanned(Menu),
    /// The root carries a parent link.
    RootHasParent,
    /// The link's edge runs from the node to its stated parent.
    Reversed(Menu),
    /// The link's edge does not join the node and its stated parent.
    NotAnEdge(Menu),
    /// Following parents from this node never reaches the root.
    Cycle(Menu),
    WrongSize {
        expected: usize,
        found: usize,
    },
}

/// Checks spanning, orientation, and acyclicity of a tree against the
/// appended diagram.
pub fn verify_spanning_tree(tree: &SpanningTree, diagram: &FlowDiagram) -> Vec<TreeViolation> {
    let nodes = 1usize << diagram.n();
    let full = diagram.full();
    if tree.parents.len() != nodes {
        return vec![TreeViolation::WrongSize {
            expected: nodes,
            found: tree.parents.len(),
        }];
    }
    let mut violations = Vec::new();
    if tree.parents[0].is_some() {
        violations.push(TreeViolation::RootHasParent);
    }
    for node in diagram.nodes().skip(1) {
        let Some(link) = tree.link(node) else {
            violations.push(TreeViolation::Unspanned(node));
            continue;
        };
        let edge_ok = diagram.has_edge(link.edge);
        let (tail, head) = (link.edge.tail(full), link.edge.head(full));
        if edge_ok && tail == link.parent && head == node {
            continue;
        }
        if edge_ok && tail == node && head == link.parent {
            violations.push(TreeViolation::Reversed(node));
        } else {
            violations.push(TreeViolation::NotAnEdge(node));
        }
    }
    // With one parent per non-root node, connectivity to the root is
    // equivalent to acyclicity.
    for node in diagram.nodes().skip(1) {
        let mut current = node;
        let mut steps = 0;
        while current != Menu::EMPTY {
            match tree.link(current) {
                Some(l) if steps <= nodes => {
                    current = l.parent;
                    steps += 1;
                }
                Some(_) => {
                    violations.push(TreeViolation::Cycle(node));
                    break;
                }
                None => break,
            }
        }
    }
    violations
}

/// One member of the preference basis and the non-tree edge that created it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub preference: Preference,
    pub witness: ContourPair,
}

/// Closes each non-tree edge into a minimal circuit.
///
/// Levels are visited upward from `|A| = 1`, menus by ascending bitmask,
/// removed elements ascending. The circuit for `A -> A \ {x}` climbs the tree
/// from `X` to `A`, takes the edge, then descends to `∅` removing the
/// smallest remaining element each time; every edge below the current level
/// is already available at that point.
pub fn preference_basis(tree: &SpanningTree, diagram: &FlowDiagram) -> Result<Vec<BasisElement>> {
    if !diagram.is_appended() {
        return Err(Error::NeedsAppendedDiagram);
    }
    let violations = verify_spanning_tree(tree, diagram);
    if !violations.is_empty() {
        return Err(Error::InvalidTree(format!("{violations:?}")));
    }
    let n = diagram.n();
    let full = diagram.full();
    let index = diagram.index();
    let mut available: Vec<bool> = index
        .pairs()
        .iter()
        .map(|&p| tree.contains_edge(Edge::Contour(p), full))
        .collect();
    let mut basis = Vec::new();
    for level in 1..=n {
        for menu in diagram.nodes().filter(|m| m.len() == level) {
            for x in menu.iter() {
                let pair = ContourPair { x, menu };
                if tree.contains_edge(Edge::Contour(pair), full) {
                    continue;
                }
                let mut ranking = Vec::with_capacity(n);
                // climb from A to X along tree links
                let mut climb = Vec::new();
                let mut node = menu;
                while node != full {
                    match tree.link(node) {
                        Some(TreeLink {
                            edge: Edge::Contour(p),
                            parent,
                        }) => {
                            climb.push(p.x);
                            node = parent;
                        }
                        _ => {
                            return Err(Error::InvalidTree(format!(
                                "no downward tree path from X to {menu:?}"
                            )))
                        }
                    }
                }
                ranking.extend(climb.into_iter().rev());
                ranking.push(x);
                let mut node = pair.head();
                while let Some(y) = node
                    .iter()
                    .find(|&y| available[index.position(ContourPair { x: y, menu: node })])
                {
                    ranking.push(y);
                    node = node.without(y);
                }
                if !node.is_empty() {
                    return Err(Error::InvalidTree(format!(
                        "no available edge leaves {node:?}"
                    )));
                }
                available[index.position(pair)] = true;
                basis.push(BasisElement {
                    preference: Preference::from_ranking(ranking)?,
                    witness: pair,
                });
            }
        }
    }
    Ok(basis)
}
