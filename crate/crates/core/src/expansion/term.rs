use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Leaf symbols of a term tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Leaf {
    /// Heat flow of the data.
    VL,
    /// The unknown itself.
    V,
    /// Drift entering the `W` bucket.
    W,
    /// Auxiliary drift.
    WBAR,
}

impl Leaf {
    pub const ALL: [Leaf; 4] = [Leaf::VL, Leaf::V, Leaf::W, Leaf::WBAR];

    pub fn symbol(self) -> &'static str {
        match self {
            Leaf::VL => "vl",
            Leaf::V => "v",
            Leaf::W => "w",
            Leaf::WBAR => "wbar",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Binary tree of `B` applications, kept in canonical form: the children of
/// every node are ordered by [`Tree`]'s `Ord` so that `B(x,y)` and `B(y,x)`
/// are the same value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tree {
    Leaf(Leaf),
    B(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn leaf(l: Leaf) -> Self {
        Tree::Leaf(l)
    }

    /// Canonical `B(x, y)`.
    pub fn b(x: Tree, y: Tree) -> Self {
        if x <= y {
            Tree::B(Box::new(x), Box::new(y))
        } else {
            Tree::B(Box::new(y), Box::new(x))
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            Tree::Leaf(_) => 0,
            Tree::B(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Number of occurrences of `l`.
    pub fn count(&self, l: Leaf) -> usize {
        match self {
            Tree::Leaf(x) => usize::from(*x == l),
            Tree::B(a, b) => a.count(l) + b.count(l),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            Tree::Leaf(_) => true,
            Tree::B(a, b) => a <= b && a.is_canonical() && b.is_canonical(),
        }
    }

    /// Parses `vl`, `v`, `w`, `wbar` and `(B x y)`; the result is
    /// canonicalized.
    pub fn parse(s: &str) -> Result<Self> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let t = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(t)
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_tokens(tok: &[String], pos: &mut usize) -> Result<Tree> {
    let next = tok
        .get(*pos)
        .ok_or_else(|| Error::Parse("unexpected end of term".into()))?;
    *pos += 1;
    match next.as_str() {
        "(" => {
            if tok.get(*pos).map(String::as_str) != Some("B") {
                return Err(Error::Parse("expected B after '('".into()));
            }
            *pos += 1;
            let a = parse_tokens(tok, pos)?;
            let b = parse_tokens(tok, pos)?;
            if tok.get(*pos).map(String::as_str) != Some(")") {
                return Err(Error::Parse("expected ')'".into()));
            }
            *pos += 1;
            Ok(Tree::b(a, b))
        }
        sym => Leaf::ALL
            .iter()
            .find(|l| l.symbol() == sym)
            .map(|l| Tree::Leaf(*l))
            .ok_or_else(|| Error::Parse(format!("unknown symbol {sym:?}"))),
    }
}

/// Depth first, then leaves before nodes, leaves by symbol order, nodes by
/// their (left, right) children.
impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth()
            .cmp(&other.depth())
            .then_with(|| match (self, other) {
                (Tree::Leaf(a), Tree::Leaf(b)) => a.cmp(b),
                (Tree::B(a1, b1), Tree::B(a2, b2)) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
                (Tree::Leaf(_), Tree::B(..)) => Ordering::Less,
                (Tree::B(..), Tree::Leaf(_)) => Ordering::Greater,
            })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(l) => f.write_str(l.symbol()),
            Tree::B(a, b) => write!(f, "(B {a} {b})"),
        }
    }
}

/// A tree with a nonzero integer coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermExpr {
    pub coefficient: i64,
    pub tree: Tree,
}

impl TermExpr {
    pub fn new(coefficient: i64, tree: Tree) -> Result<Self> {
        if coefficient == 0 {
            return Err(Error::InvalidConfig(
                "term coefficient must be nonzero".into(),
            ));
        }
        Ok(Self { coefficient, tree })
    }

    /// `"<coefficient> <tree>"`.
    pub fn to_line(&self) -> String {
        format!("{} {}", self.coefficient, self.tree)
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let line = line.trim();
        let (c, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("missing tree in {line:?}")))?;
        let coefficient = c
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
        Self::new(coefficient, Tree::parse(rest)?)
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Handle of a tree interned in a [`TermStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Leaf(Leaf),
    B(TreeId, TreeId),
}

#[derive(Debug, Clone, Copy)]
struct Meta {
    depth: u32,
    counts: [u32; 4],
}

/// Hash-consing arena: structurally equal canonical trees share one id.
#[derive(Debug, Default, Clone)]
pub struct TermStore {
    nodes: Vec<Node>,
    meta: Vec<Meta>,
    index: HashMap<Node, TreeId>,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn insert(&mut self, node: Node, meta: Meta) -> TreeId {
        if let Some(id) = self.index.get(&node) {
            return *id;
        }
        let id = TreeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.meta.push(meta);
        self.index.insert(node, id);
        id
    }

    pub fn leaf(&mut self, l: Leaf) -> TreeId {
        let mut counts = [0; 4];
        counts[l.index()] = 1;
        self.insert(Node::Leaf(l), Meta { depth: 0, counts })
    }

    /// Canonical `B(a, b)`.
    pub fn b(&mut self, a: TreeId, b: TreeId) -> TreeId {
        let (a, b) = if self.cmp(a, b) == Ordering::Greater {
            (b, a)
        } else {
            (a, b)
        };
        let (ma, mb) = (self.meta[a.0 as usize], self.meta[b.0 as usize]);
        let mut counts = ma.counts;
        for (c, d) in counts.iter_mut().zip(mb.counts) {
            *c += d;
        }
        self.insert(
            Node::B(a, b),
            Meta {
                depth: 1 + ma.depth.max(mb.depth),
                counts,
            },
        )
    }

    /// Same order as `Ord for Tree`.
    pub fn cmp(&self, a: TreeId, b: TreeId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let (da, db) = (self.meta[a.0 as usize].depth, self.meta[b.0 as usize].depth);
        da.cmp(&db).then_with(
            || match (self.nodes[a.0 as usize], self.nodes[b.0 as usize]) {
                (Node::Leaf(x), Node::Leaf(y)) => x.cmp(&y),
                (Node::B(a1, b1), Node::B(a2, b2)) => {
                    self.cmp(a1, a2).then_with(|| self.cmp(b1, b2))
                }
                (Node::Leaf(_), Node::B(..)) => Ordering::Less,
                (Node::B(..), Node::Leaf(_)) => Ordering::Greater,
            },
        )
    }

    pub fn count(&self, id: TreeId, l: Leaf) -> u32 {
        self.meta[id.0 as usize].counts[l.index()]
    }

    pub fn depth(&self, id: TreeId) -> u32 {
        self.meta[id.0 as usize].depth
    }

    /// Leaf symbol or children of `id`.
    pub fn node(&self, id: TreeId) -> std::result::Result<Leaf, (TreeId, TreeId)> {
        match self.nodes[id.0 as usize] {
            Node::Leaf(l) => Ok(l),
            Node::B(a, b) => Err((a, b)),
        }
    }

    pub fn intern(&mut self, t: &Tree) -> TreeId {
        match t {
            Tree::Leaf(l) => self.leaf(*l),
            Tree::B(a, b) => {
                let (a, b) = (self.intern(a), self.intern(b));
                self.b(a, b)
            }
        }
    }

    pub fn tree(&self, id: TreeId) -> Tree {
        match self.nodes[id.0 as usize] {
            Node::Leaf(l) => Tree::Leaf(l),
            Node::B(a, b) => Tree::B(Box::new(self.tree(a)), Box::new(self.tree(b))),
        }
    }

    pub fn sexpr(&self, id: TreeId) -> String {
        let mut s = String::new();
        self.write_sexpr(id, &mut s);
        s
    }

    fn write_sexpr(&self, id: TreeId, out: &mut String) {
        match self.nodes[id.0 as usize] {
            Node::Leaf(l) => out.push_str(l.symbol()),
            Node::B(a, b) => {
                out.push_str("(B ");
                self.write_sexpr(a, out);
                out.push(' ');
                self.write_sexpr(b, out);
                out.push(')');
            }
        }
    }
}
