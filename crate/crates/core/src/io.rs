//! Text instance format and CSV reports.
//!
//! ```text
//! mcg 1
//! graph <n> <m>
//! edge <u> <v> <length> <cost>      (m lines, ids from 0)
//! pairs <K>                         followed by K lines `pair <s> <t>`
//! pairs dist>= <t>                  (alternative: all pairs at distance >= t)
//! mark <name> <vertex>              (optional, after the graph line)
//! ```
//!
//! `#` starts a comment. Rationals are written `p/q` or as integers.

use std::fmt::Write as _;

use thiserror::Error;

use crate::carr_vempala::ConvexDecomposition;
use crate::decomp::DecompositionFamily;
use crate::graph::{Graph, GraphError, VertexId};
use crate::multicut::{GapResult, MulticutError, MulticutInstance, PairSet};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error(transparent)]
    Instance(#[from] MulticutError),
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..i],
                    column: body[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct Cursor<'a> {
    lines: Vec<(usize, Vec<Token<'a>>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<_> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, tokens(l)))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        let last_line = text.lines().count().max(1);
        Self { lines, pos: 0, last_line }
    }

    fn peek_keyword(&self) -> Option<&str> {
        self.lines.get(self.pos).map(|(_, t)| t[0].text)
    }

    fn next(&mut self, keyword: &str, arity: usize) -> Result<(usize, Vec<&'a str>, Vec<usize>), ParseError> {
        let Some((line, toks)) = self.lines.get(self.pos) else {
            return Err(ParseError::Syntax {
                line: self.last_line,
                column: 1,
                message: format!("unexpected end of input, expected `{keyword}`"),
            });
        };
        let line = *line;
        if toks[0].text != keyword {
            return Err(ParseError::Syntax {
                line,
                column: toks[0].column,
                message: format!("expected `{keyword}`, found `{}`", toks[0].text),
            });
        }
        if toks.len() != arity + 1 {
            let column = toks.get(arity + 1).map_or(toks[toks.len() - 1].column, |t| t.column);
            return Err(ParseError::Syntax {
                line,
                column,
                message: format!("`{keyword}` takes {arity} arguments, found {}", toks.len() - 1),
            });
        }
        self.pos += 1;
        Ok((
            line,
            toks[1..].iter().map(|t| t.text).collect(),
            toks[1..].iter().map(|t| t.column).collect(),
        ))
    }
}

fn number<T: std::str::FromStr>(text: &str, line: usize, column: usize, what: &str) -> Result<T, ParseError> {
    text.parse().map_err(|_| ParseError::Syntax {
        line,
        column,
        message: format!("expected {what}, found `{text}`"),
    })
}

fn take_marks(cur: &mut Cursor<'_>, marks: &mut Vec<(usize, String, VertexId)>) -> Result<(), ParseError> {
    while cur.peek_keyword() == Some("mark") {
        let (line, args, cols) = cur.next("mark", 2)?;
        let v = number(args[1], line, cols[1], "a vertex id")?;
        marks.push((line, args[0].to_string(), v));
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<MulticutInstance, ParseError> {
    let mut cur = Cursor::new(text);
    let (line, args, cols) = cur.next("mcg", 1)?;
    if args[0] != "1" {
        return Err(ParseError::Syntax {
            line,
            column: cols[0],
            message: format!("unsupported format version `{}`", args[0]),
        });
    }
    let (line, args, cols) = cur.next("graph", 2)?;
    let n: usize = number(args[0], line, cols[0], "a vertex count")?;
    let m: usize = number(args[1], line, cols[1], "an edge count")?;
    let mut g = Graph::new(n);
    let mut costs = Vec::with_capacity(m);
    let mut marks = Vec::new();
    for _ in 0..m {
        take_marks(&mut cur, &mut marks)?;
        let (line, args, cols) = cur.next("edge", 4)?;
        let u = number(args[0], line, cols[0], "a vertex id")?;
        let v = number(args[1], line, cols[1], "a vertex id")?;
        let len = number(args[2], line, cols[2], "a positive length")?;
        let cost = rational::parse(args[3]).ok_or_else(|| ParseError::Syntax {
            line,
            column: cols[3],
            message: format!("expected a rational cost, found `{}`", args[3]),
        })?;
        g.add_edge(u, v, len).map_err(|source| ParseError::Graph { line, source })?;
        costs.push(cost);
    }
    take_marks(&mut cur, &mut marks)?;
    let pairs = match cur.lines.get(cur.pos).map(|(_, t)| t.len()) {
        Some(3) => {
            let (line, args, cols) = cur.next("pairs", 2)?;
            if args[0] != "dist>=" {
                return Err(ParseError::Syntax {
                    line,
                    column: cols[0],
                    message: format!("expected `dist>=`, found `{}`", args[0]),
                });
            }
            PairSet::AtDistance(number(args[1], line, cols[1], "a distance")?)
        }
        _ => {
            let (line, args, cols) = cur.next("pairs", 1)?;
            let k: usize = number(args[0], line, cols[0], "a pair count")?;
            let mut list = Vec::with_capacity(k);
            for _ in 0..k {
                take_marks(&mut cur, &mut marks)?;
                let (line, args, cols) = cur.next("pair", 2)?;
                let s = number(args[0], line, cols[0], "a vertex id")?;
                let t = number(args[1], line, cols[1], "a vertex id")?;
                list.push((s, t));
            }
            PairSet::Explicit(list)
        }
    };
    take_marks(&mut cur, &mut marks)?;
    if let Some((line, toks)) = cur.lines.get(cur.pos) {
        return Err(ParseError::Syntax {
            line: *line,
            column: toks[0].column,
            message: format!("unexpected `{}`", toks[0].text),
        });
    }
    for (line, name, v) in marks {
        g.set_mark(name, v).map_err(|source| ParseError::Graph { line, source })?;
    }
    Ok(MulticutInstance::new(g, costs, pairs)?)
}

/// Canonical text: edges by id, pairs lexicographic, marks by name.
pub fn emit_instance(instance: &MulticutInstance) -> String {
    let g = instance.graph();
    let mut out = String::from("mcg 1\n");
    let _ = writeln!(out, "graph {} {}", g.vertex_count(), g.edge_count());
    for (e, c) in g.edges().iter().zip(instance.costs()) {
        let _ = writeln!(out, "edge {} {} {} {}", e.u, e.v, e.length, rational::format(c));
    }
    match instance.pair_set() {
        PairSet::Explicit(list) => {
            let _ = writeln!(out, "pairs {}", list.len());
            for (s, t) in list {
                let _ = writeln!(out, "pair {s} {t}");
            }
        }
        PairSet::AtDistance(t) => {
            let _ = writeln!(out, "pairs dist>= {t}");
        }
    }
    for (name, v) in g.marks() {
        let _ = writeln!(out, "mark {name} {v}");
    }
    out
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// One line of a gap table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub instance: String,
    pub edges: usize,
    pub pairs: usize,
    pub opt_lp: Rational,
    pub opt_ip: Rational,
    pub ip_optimal: bool,
    pub ip_lower_bound: Rational,
    pub gap: Option<Rational>,
    pub nodes: usize,
}

pub const GAP_HEADER: [&str; 9] = [
    "instance",
    "edges",
    "pairs",
    "opt_lp",
    "opt_ip",
    "ip_optimal",
    "ip_lower_bound",
    "gap",
    "bb_nodes",
];

impl GapReport {
    pub fn new(name: impl Into<String>, instance: &MulticutInstance, result: &GapResult) -> Self {
        Self {
            instance: name.into(),
            edges: instance.graph().edge_count(),
            pairs: instance.pairs().len(),
            opt_lp: result.lp.value.clone(),
            opt_ip: result.ip.solution.cost.clone(),
            ip_optimal: result.ip.optimal,
            ip_lower_bound: result.ip.lower_bound.clone(),
            gap: result.gap.clone(),
            nodes: result.ip.nodes,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.instance.clone(),
            self.edges.to_string(),
            self.pairs.to_string(),
            rational::format(&self.opt_lp),
            rational::format(&self.opt_ip),
            self.ip_optimal.to_string(),
            rational::format(&self.ip_lower_bound),
            self.gap.as_ref().map_or_else(|| "n/a".to_string(), rational::format),
            self.nodes.to_string(),
        ]
    }
}

pub fn emit_report(reports: &[GapReport]) -> String {
    csv_string(&GAP_HEADER, reports.iter().map(GapReport::record))
}

/// `member_id,bitmask,diameter,radius` (radius empty without a root).
pub fn emit_family(family: &DecompositionFamily, root: Option<VertexId>) -> String {
    let metrics = family.metrics(root);
    csv_string(
        &["member_id", "bitmask", "diameter", "radius"],
        family.masks().iter().zip(metrics).enumerate().map(|(i, (mask, (d, r)))| {
            vec![
                i.to_string(),
                format!("{mask:#x}"),
                d.to_string(),
                r.map_or_else(String::new, |r| r.to_string()),
            ]
        }),
    )
}

/// `term_id,weight,edges` with edge ids separated by spaces.
pub fn emit_decomposition(dec: &ConvexDecomposition) -> String {
    csv_string(
        &["term_id", "weight", "edges"],
        dec.terms.iter().enumerate().map(|(i, (f, y))| {
            let edges: Vec<String> = f.edges.iter().map(|e| e.to_string()).collect();
            vec![i.to_string(), rational::format(y), edges.join(" ")]
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierRow {
    pub w: u64,
    pub k: Option<u64>,
    pub m: usize,
    pub p: Rational,
    pub family_size: usize,
    pub pivots: usize,
}

/// `w,k,m,p,wp,family_size,pivots`.
pub fn emit_frontier(rows: &[FrontierRow]) -> String {
    csv_string(
        &["w", "k", "m", "p", "wp", "family_size", "pivots"],
        rows.iter().map(|r| {
            vec![
                r.w.to_string(),
                r.k.map_or_else(String::new, |k| k.to_string()),
                r.m.to_string(),
                rational::format(&r.p),
                rational::format(&(&r.p * rational::int(r.w as i64))),
                r.family_size.to_string(),
                r.pivots.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_cactus_gap;
    use crate::multicut::gap;
    use crate::rational::ratio;

    const MINIMAL: &str = "mcg 1\ngraph 2 1\nedge 0 1 1 3/2\npairs 1\npair 0 1\n";

    #[test]
    fn minimal_round_trip() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!(inst.costs(), &[ratio(3, 2)]);
        assert_eq!(emit_instance(&inst), MINIMAL);
    }

    #[test]
    fn comments_marks_and_canonical_order() {
        let text = "# header\nmcg 1\ngraph 3 2  # two edges\nmark s 0\nedge 0 1 1 1\nedge 1 2 2 6/4\npairs 2\npair 2 0\npair 1 0\nmark t 2\n";
        let inst = parse_instance(text).unwrap();
        let canon = "mcg 1\ngraph 3 2\nedge 0 1 1 1\nedge 1 2 2 3/2\npairs 2\npair 0 1\npair 0 2\nmark s 0\nmark t 2\n";
        assert_eq!(emit_instance(&inst), canon);
        assert_eq!(parse_instance(canon).unwrap(), inst);
    }

    #[test]
    fn implicit_pairs() {
        let text = "mcg 1\ngraph 3 2\nedge 0 1 1 1\nedge 1 2 1 1\npairs dist>= 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.pairs(), vec![(0, 2)]);
        assert_eq!(emit_instance(&inst), text);
    }

    #[test]
    fn generated_round_trip() {
        let c = gen_cactus_gap(2).unwrap();
        let text = emit_instance(&c.instance);
        assert_eq!(parse_instance(&text).unwrap(), c.instance);
    }

    #[test]
    fn located_errors() {
        let err = parse_instance("mcg 1\ngraph 2 1\nedge 0 1 x 1\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 3,
                column: 10,
                message: "expected a positive length, found `x`".into()
            }
        );
        let err = parse_instance("mcg 1\ngraph 2 2\nedge 0 1 1 1\nedge 1 0 1 1\npairs 0\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Graph {
                line: 4,
                source: GraphError::ParallelEdge(0, 1)
            }
        );
        let err = parse_instance("mcg 1\ngraph 2 1\nedge 0 1 1 1\npairs 1\npair 1 1\n").unwrap_err();
        assert_eq!(err, ParseError::Instance(MulticutError::TrivialPair(1)));
        let err = parse_instance("mcg 1\ngraph 2 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_instance(&format!("{MINIMAL}extra 1\n")).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 6, column: 1, .. }));
    }

    #[test]
    fn gap_csv() {
        let c = gen_cactus_gap(1).unwrap();
        let res = gap(&c.instance, 1000).unwrap();
        let csv = emit_report(&[GapReport::new("cactus-1", &c.instance, &res)]);
        assert_eq!(
            csv,
            "instance,edges,pairs,opt_lp,opt_ip,ip_optimal,ip_lower_bound,gap,bb_nodes\ncactus-1,7,1,1,1,true,1,1,1\n"
        );
        let empty = MulticutInstance::with_unit_costs(Graph::path(1), PairSet::Explicit(vec![])).unwrap();
        let res = gap(&empty, 10).unwrap();
        let csv = emit_report(&[GapReport::new("empty", &empty, &res)]);
        assert!(csv.lines().nth(1).unwrap().contains(",n/a,"));
    }
}
