//! Star-shaped diagrams of `α_m`: the central node, one leg per partition,
//! and nodes not orthogonal to `α_m` drawn dotted.

use middleconv::{alpha_of, RootVector, SimpleRoot, SpectralType};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    /// `None` for the central node.
    pub leg: Option<usize>,
    pub position: usize,
    pub coefficient: i64,
    /// `(α_m | α_i)`.
    pub pairing: i64,
    pub dotted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagram {
    pub alpha: RootVector,
    pub nodes: Vec<Node>,
    pub edges: Vec<(String, String)>,
}

fn node_id(r: SimpleRoot) -> String {
    match r {
        SimpleRoot::Zero => "a0".into(),
        SimpleRoot::Leg { j, nu } => format!("a{j}_{nu}"),
    }
}

impl Diagram {
    pub fn of(m: &SpectralType) -> Self {
        let alpha = alpha_of(m);
        let node = |r: SimpleRoot, leg: Option<usize>, position: usize| {
            let pairing = alpha.pair_simple(r);
            Node {
                id: node_id(r),
                leg,
                position,
                coefficient: alpha.coeff(r),
                pairing,
                dotted: pairing != 0,
            }
        };
        let mut nodes = vec![node(SimpleRoot::Zero, None, 0)];
        let mut edges = Vec::new();
        for (j, leg) in alpha.legs().iter().enumerate() {
            let mut prev = node_id(SimpleRoot::Zero);
            for nu in 1..=leg.len() {
                if leg[nu - 1] == 0 {
                    break;
                }
                let r = SimpleRoot::Leg { j, nu };
                nodes.push(node(r, Some(j), nu));
                edges.push((prev, node_id(r)));
                prev = node_id(r);
            }
        }
        Self { alpha, nodes, edges }
    }

    fn label(n: &Node) -> String {
        if n.dotted {
            format!("({})", n.coefficient)
        } else {
            n.coefficient.to_string()
        }
    }

    /// Legs as label lists, in leg order.
    fn legs(&self) -> Vec<Vec<String>> {
        let count = self.nodes.iter().filter_map(|n| n.leg).max().map_or(0, |j| j + 1);
        let mut legs = vec![Vec::new(); count];
        for n in &self.nodes {
            if let Some(j) = n.leg {
                legs[j].push(Self::label(n));
            }
        }
        legs.retain(|l| !l.is_empty());
        legs
    }

    /// The two longest legs run horizontally through the centre; the others
    /// hang below it.
    pub fn to_ascii(&self) -> String {
        let mut legs = self.legs();
        legs.sort_by_key(|l| std::cmp::Reverse(l.len()));
        let mut legs = legs.into_iter();
        let right = legs.next().unwrap_or_default();
        let mut left = legs.next().unwrap_or_default();
        let below: Vec<Vec<String>> = legs.collect();
        left.reverse();

        let center = Self::label(&self.nodes[0]);
        let mut line = String::new();
        for l in &left {
            line.push_str(l);
            line.push_str(" ─ ");
        }
        let col = line.chars().count();
        line.push_str(&center);
        for r in &right {
            line.push_str(" ─ ");
            line.push_str(r);
        }
        let mut out = vec![line];

        if !below.is_empty() {
            let step = below.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1) + 3;
            let cols: Vec<usize> = (0..below.len()).map(|i| col + i * step).collect();
            let mut branch = " ".repeat(col);
            for i in 0..below.len() {
                let glyph = match (i, below.len()) {
                    (0, 1) => '│',
                    (0, _) => '├',
                    (i, n) if i + 1 == n => '┐',
                    _ => '┬',
                };
                branch.push(glyph);
                if i + 1 < below.len() {
                    branch.push_str(&"─".repeat(step - 1));
                }
            }
            out.push(branch);
            let depth = below.iter().map(Vec::len).max().unwrap_or(0);
            for d in 0..depth {
                if d > 0 {
                    out.push(place(&cols, &below, |l| (l.len() > d).then(|| "│".to_string())));
                }
                out.push(place(&cols, &below, |l| l.get(d).cloned()));
            }
        }
        let mut s = out.join("\n");
        s.push('\n');
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph alpha {\n  node [shape=circle];\n");
        for n in &self.nodes {
            let style = if n.dotted { ", style=dotted" } else { "" };
            s.push_str(&format!("  {} [label=\"{}\"{style}];\n", n.id, n.coefficient));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("  {a} -- {b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// One text row with a cell per hanging leg at its column.
fn place(cols: &[usize], legs: &[Vec<String>], cell: impl Fn(&Vec<String>) -> Option<String>) -> String {
    let mut row = String::new();
    for (c, l) in cols.iter().zip(legs) {
        if let Some(text) = cell(l) {
            let len = row.chars().count();
            row.push_str(&" ".repeat(c.saturating_sub(len)));
            row.push_str(&text);
        }
    }
    row
}
