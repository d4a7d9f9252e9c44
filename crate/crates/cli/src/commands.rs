use anyhow::{anyhow, bail, Context as _};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use veerkit::algebra::LaurentPoly;
use veerkit::branched_surface::BranchedSurface;
use veerkit::group_theory::{
    abelianization, character_with_omega, invariant_factors, presentation_from_spine, twisted_alexander,
    word_of_cycle, Presentation,
};
use veerkit::perm::Perm4;
use veerkit::signature::{decode_str, encode_taut_signature};
use veerkit::surgery::{blow_up, filling_slope, vertical_surgery, SurgeryCurve};
use veerkit::taut_polynomial::{h_pairings, homology_invariants, taut_polynomial_with_tree};
use veerkit::triangulation::{check_veering, spanning_tree, Color, SpanningTree, TautStructure, Triangulation, TreeStrategy};
use veerkit::Error;

use crate::{Cli, Command, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Inconsistent,
    AssertionFailed,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    /// `None` for inputs filtered out by `--max-tets`.
    pub record: Option<Value>,
}

enum TreeChoice {
    Bfs,
    Reverse,
    Faces(Vec<usize>),
}

pub struct Context {
    command: Command,
    tree: TreeChoice,
    route: Route,
    k: Option<usize>,
    curve: Option<SurgeryCurve>,
    max_tets: Option<usize>,
    assert_nonzero: bool,
}

impl Context {
    pub fn new(cli: &Cli) -> anyhow::Result<Context> {
        let tree = match cli.tree.as_str() {
            "bfs" => TreeChoice::Bfs,
            "reverse" => TreeChoice::Reverse,
            list => TreeChoice::Faces(
                list.split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("--tree: expected bfs, reverse or a list of faces, got {list:?}"))?,
            ),
        };
        let curve = match &cli.curve {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Some(SurgeryCurve::from_json(&text)?)
            }
            None => None,
        };
        if matches!(cli.command, Command::Surgery { .. } | Command::BlowUp { .. }) && curve.is_none() {
            bail!("this command needs --curve");
        }
        Ok(Context {
            command: cli.command.clone(),
            tree,
            route: cli.route,
            k: cli.k,
            curve,
            max_tets: cli.max_tets,
            assert_nonzero: cli.assert_nonzero,
        })
    }

    pub fn run(&self, job: &str) -> Outcome {
        let result = match &self.command {
            Command::Decode { .. } => self.decode(job),
            Command::Encode { .. } => self.encode(job),
            Command::TautPoly { .. } | Command::CensusScan { .. } => self.taut_poly(job),
            Command::Homology { .. } => self.homology(job),
            Command::TwistedAlex { .. } => self.twisted_alex(job),
            Command::Surgery { .. } => self.surgery(job),
            Command::BlowUp { .. } => self.blow_up(job),
            Command::CompareRoutes { .. } => self.compare_routes(job),
        };
        match result {
            Ok(o) => o,
            Err(e) => {
                let status = match e.downcast_ref::<Error>() {
                    Some(Error::InternalInconsistency(_)) => Status::Inconsistent,
                    _ => Status::Failed,
                };
                let input = if matches!(self.command, Command::TwistedAlex { .. }) { json!(null) } else { json!(job) };
                Outcome { status, record: Some(json!({"input": input, "error": format!("{e:#}")})) }
            }
        }
    }

    fn tree_for(&self, bs: &BranchedSurface) -> veerkit::Result<SpanningTree> {
        let g = bs.dual_graph();
        let strategy = match &self.tree {
            TreeChoice::Bfs => TreeStrategy::FirstBfs,
            TreeChoice::Reverse => TreeStrategy::Ordered((0..g.edges.len()).rev().collect()),
            TreeChoice::Faces(f) => TreeStrategy::Prescribed(f.clone()),
        };
        spanning_tree(&g, &strategy)
    }

    fn surface(&self, job: &str) -> anyhow::Result<Surface> {
        let (tri, taut) = decode_str(job)?;
        let bs = BranchedSurface::build(&tri, &taut)?;
        let tree = self.tree_for(&bs)?;
        Ok(Surface { tri, bs, tree })
    }

    fn decode(&self, job: &str) -> anyhow::Result<Outcome> {
        let (tri, taut) = decode_str(job)?;
        let mut rec = base(job, &tri);
        rec.insert("gluings".into(), tri.to_json());
        rec.insert("angles".into(), json!(taut.angles.iter().map(|a| char::from(b'0' + a)).collect::<String>()));
        rec.insert("top".into(), json!(taut.top));
        match BranchedSurface::build(&tri, &taut) {
            Ok(bs) => {
                rec.insert("veering".into(), json!(true));
                rec.insert("colors".into(), json!(bs.veering.colors.iter().map(|&c| color_name(c)).collect::<Vec<_>>()));
                rec.insert("dual_graph".into(), json!(bs.dual_graph().edges));
                let sectors: Vec<Value> = bs
                    .sectors
                    .iter()
                    .map(|s| json!({"edge": s.edge, "color": color_name(s.color), "word": s.word, "top": s.top}))
                    .collect();
                rec.insert("sectors".into(), json!(sectors));
            }
            Err(e @ (Error::NotVeering(_) | Error::NotTaut(_))) => {
                rec.insert("veering".into(), json!(false));
                rec.insert("reason".into(), json!(e.to_string()));
            }
            Err(e) => return Err(e.into()),
        }
        Ok(ok(rec))
    }

    fn encode(&self, job: &str) -> anyhow::Result<Outcome> {
        let (tri, taut) = if job.trim_start().starts_with('{') {
            from_json(job)?
        } else {
            decode_str(job)?
        };
        let sig = encode_taut_signature(&tri, &taut)?;
        let mut rec = Map::new();
        rec.insert("input".into(), json!(job));
        rec.insert("signature".into(), json!(sig.to_string()));
        rec.insert("tetrahedra".into(), json!(tri.size()));
        Ok(ok(rec))
    }

    fn taut_poly(&self, job: &str) -> anyhow::Result<Outcome> {
        let (tri, _) = decode_str(job)?;
        if self.max_tets.is_some_and(|m| tri.size() > m) {
            return Ok(Outcome { status: Status::Ok, record: None });
        }
        let s = self.surface(job)?;
        let h = h_pairings(&s.bs, &s.tree);
        let mut rec = base(job, &s.tri);
        rec.insert("homology".into(), ints(&homology_invariants(&h)));
        rec.insert("rank".into(), json!(h.rank));
        let matrix = || taut_polynomial_with_tree(&s.bs, &s.tree).normalized();
        let poly = match self.route {
            Route::Matrix => matrix(),
            Route::Fox => s.fox()?,
            Route::Both => {
                let (m, f) = (matrix(), s.fox()?);
                if !m.eq_up_to_unit(&f) {
                    rec.insert("matrix".into(), json!(m.to_string()));
                    rec.insert("fox".into(), json!(f.to_string()));
                    rec.insert("error".into(), json!("route disagreement"));
                    return Ok(Outcome { status: Status::Inconsistent, record: Some(Value::Object(rec)) });
                }
                m
            }
        };
        rec.insert("polynomial".into(), json!(poly.to_string()));
        rec.insert("route".into(), json!(route_name(self.route)));
        let status = if self.assert_nonzero && poly.is_zero() { Status::AssertionFailed } else { Status::Ok };
        if matches!(self.command, Command::CensusScan { .. }) {
            rec.insert("nonzero".into(), json!(!poly.is_zero()));
        }
        Ok(Outcome { status, record: Some(Value::Object(rec)) })
    }

    fn homology(&self, job: &str) -> anyhow::Result<Outcome> {
        let s = self.surface(job)?;
        let h = h_pairings(&s.bs, &s.tree);
        let mut rec = base(job, &s.tri);
        rec.insert("homology".into(), ints(&homology_invariants(&h)));
        rec.insert("rank".into(), json!(h.rank));
        Ok(ok(rec))
    }

    fn twisted_alex(&self, text: &str) -> anyhow::Result<Outcome> {
        // an optional `omega: ±1,±1,...` line gives the orientation character
        let mut omega = None;
        let mut rest = String::new();
        for line in text.lines() {
            match line.trim().strip_prefix("omega:") {
                Some(v) => {
                    let vals: Vec<i32> = v
                        .split(',')
                        .map(|x| x.trim().parse::<i32>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| Error::Parse(format!("omega line {line:?}")))?;
                    if vals.iter().any(|&x| x != 1 && x != -1) {
                        return Err(Error::Parse(format!("omega values must be 1 or -1: {line:?}")).into());
                    }
                    omega = Some(vals);
                }
                None => {
                    rest.push_str(line);
                    rest.push('\n');
                }
            }
        }
        let p = Presentation::parse(&rest)?;
        let omega = omega.unwrap_or_else(|| vec![1; p.generators.len()]);
        if omega.len() != p.generators.len() {
            bail!(Error::Parse(format!("{} omega values for {} generators", omega.len(), p.generators.len())));
        }
        let ch = character_with_omega(&p, omega)?;
        let poly = twisted_alexander(&p, &ch).normalized();
        let mut rec = Map::new();
        rec.insert("generators".into(), json!(p.generators));
        rec.insert("relators".into(), json!(p.relators.len()));
        rec.insert("homology".into(), ints(&invariant_factors(&abelianization(&p))));
        rec.insert("rank".into(), json!(ch.nvars));
        rec.insert("omega".into(), json!(ch.omega));
        rec.insert("polynomial".into(), json!(poly.to_string()));
        Ok(ok(rec))
    }

    fn surgery(&self, job: &str) -> anyhow::Result<Outcome> {
        let (tri, taut) = decode_str(job)?;
        let k = self.k.unwrap_or(1);
        let (t, tt) = vertical_surgery(&tri, &taut, self.curve.as_ref().unwrap(), k)?;
        let veering = check_veering(&t, &tt).is_ok();
        if !veering {
            bail!(Error::InternalInconsistency("surgery produced a non-veering triangulation".into()));
        }
        let mut rec = Map::new();
        rec.insert("input".into(), json!(job));
        rec.insert("k".into(), json!(k));
        rec.insert("signature".into(), json!(encode_taut_signature(&t, &tt)?.to_string()));
        rec.insert("tetrahedra".into(), json!(t.size()));
        rec.insert("veering".into(), json!(veering));
        Ok(ok(rec))
    }

    fn blow_up(&self, job: &str) -> anyhow::Result<Outcome> {
        let (tri, taut) = decode_str(job)?;
        let b = blow_up(&tri, &taut, self.curve.as_ref().unwrap())?;
        let tree = spanning_tree(&b.spine.dual_graph(), &TreeStrategy::FirstBfs)?;
        let (p, ch) = presentation_from_spine(&b.spine, &tree)?;
        let mut rec = Map::new();
        rec.insert("input".into(), json!(job));
        rec.insert("vertices".into(), json!(b.spine.vertex_count));
        rec.insert("edges".into(), json!(b.spine.edges.len()));
        rec.insert("sectors".into(), json!(b.spine.sectors.len()));
        rec.insert("arcs".into(), json!(b.arcs));
        rec.insert("low_sutures".into(), json!(b.low_sutures));
        rec.insert("high_sutures".into(), json!(b.high_sutures));
        rec.insert("tube_sectors".into(), json!(b.tube_sectors));
        rec.insert("drilled_homology".into(), ints(&invariant_factors(&abelianization(&p))));
        rec.insert("presentation".into(), json!(p.to_text()));
        if let Some(k) = self.k {
            let fs = filling_slope(&b, k)?;
            let mut q = p.clone();
            q.relators.push(word_of_cycle(&p, &tree, &fs.slope)?);
            let ch_k = character_with_omega(&q, ch.omega.clone())?;
            rec.insert("k".into(), json!(k));
            rec.insert("filled_homology".into(), ints(&invariant_factors(&abelianization(&q))));
            rec.insert("filled_polynomial".into(), json!(twisted_alexander(&q, &ch_k).normalized().to_string()));
        }
        Ok(ok(rec))
    }

    fn compare_routes(&self, job: &str) -> anyhow::Result<Outcome> {
        let s = self.surface(job)?;
        let h = h_pairings(&s.bs, &s.tree);
        let m = taut_polynomial_with_tree(&s.bs, &s.tree).normalized();
        let f = s.fox()?;
        let agree = m.eq_up_to_unit(&f);
        let mut rec = base(job, &s.tri);
        rec.insert("rank".into(), json!(h.rank));
        rec.insert("matrix".into(), json!(m.to_string()));
        rec.insert("fox".into(), json!(f.to_string()));
        rec.insert("agree".into(), json!(agree));
        if h.rank != 1 {
            rec.insert("caveat".into(), json!("H has rank other than 1; agreement is checked in the full group ring of H"));
        }
        let status = if agree { Status::Ok } else { Status::Inconsistent };
        Ok(Outcome { status, record: Some(Value::Object(rec)) })
    }
}

struct Surface {
    tri: Triangulation,
    bs: BranchedSurface,
    tree: SpanningTree,
}

impl Surface {
    fn fox(&self) -> anyhow::Result<LaurentPoly> {
        let (p, ch) = presentation_from_spine(&self.bs.spine, &self.tree)?;
        Ok(twisted_alexander(&p, &ch).normalized())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTriangulation {
    gluings: Vec<[(usize, usize, String); 4]>,
    angles: String,
}

/// `{"gluings": [[[tet, facet, "perm"], x4], ...], "angles": "0120..."}`, the shape `decode` emits.
fn from_json(text: &str) -> anyhow::Result<(Triangulation, TautStructure)> {
    let j: JsonTriangulation = serde_json::from_str(text).map_err(|e| Error::Parse(format!("triangulation: {e}")))?;
    let mut adj = Vec::with_capacity(j.gluings.len());
    for (t, row) in j.gluings.iter().enumerate() {
        let mut out = [(0, Perm4::new([0, 1, 2, 3]).unwrap()); 4];
        for (f, (u, g, perm)) in row.iter().enumerate() {
            let p = parse_perm(perm)?;
            if p.apply(f) != *g {
                bail!(Error::Parse(format!("tetrahedron {t} facet {f}: permutation {perm} does not send {f} to {g}")));
            }
            out[f] = (*u, p);
        }
        adj.push(out);
    }
    let tri = Triangulation::new(adj)?;
    let angles = j
        .angles
        .bytes()
        .map(|b| match b {
            b'0'..=b'2' => Ok(b - b'0'),
            _ => Err(Error::Parse(format!("angle digit {:?}", b as char))),
        })
        .collect::<Result<Vec<u8>, _>>()?;
    let taut = TautStructure::from_angles(&tri, &angles)?;
    Ok((tri, taut))
}

fn parse_perm(s: &str) -> anyhow::Result<Perm4> {
    let d: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
    if d.len() != 4 {
        return Err(anyhow!(Error::Parse(format!("permutation {s:?}"))));
    }
    Perm4::new([d[0], d[1], d[2], d[3]]).ok_or_else(|| anyhow!(Error::Parse(format!("permutation {s:?}"))))
}

fn base(job: &str, tri: &Triangulation) -> Map<String, Value> {
    let mut rec = Map::new();
    rec.insert("signature".into(), json!(job.trim()));
    rec.insert("tetrahedra".into(), json!(tri.size()));
    rec
}

fn ok(rec: Map<String, Value>) -> Outcome {
    Outcome { status: Status::Ok, record: Some(Value::Object(rec)) }
}

/// Small integers as JSON numbers; anything wider as a string.
fn ints(v: &[BigInt]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| match i64::try_from(x) {
                Ok(n) => json!(n),
                Err(_) => json!(x.to_string()),
            })
            .collect(),
    )
}

fn color_name(c: Color) -> &'static str {
    match c {
        Color::Red => "red",
        Color::Blue => "blue",
    }
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Matrix => "matrix",
        Route::Fox => "fox",
        Route::Both => "both",
    }
}
