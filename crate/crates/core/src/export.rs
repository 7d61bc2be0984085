//! Pipeline traces, fragment exports and their renderings.
//!
//! Everything here is deterministic: objects are visited in registration
//! order, hom-sets in enumeration order, and no timings are recorded.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Budget, Category, Obj};
use crate::completeness::check_complete;
use crate::completions::{Kind, Pipeline, QuotientCompletion};
use crate::doctrine::Doctrine;
use crate::error::Result;
use crate::morphism::DoctrineMorphism;
use crate::registry::ModelSpec;
use crate::report::ValidationReport;
use crate::topos::{check_topos, ToposConfig, ToposStructure};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectCensus {
    /// Label of the fragment entry: a base object or `A/⊤`.
    pub base: String,
    pub object: String,
    pub carrier: usize,
    pub fiber: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomCensus {
    pub from: String,
    pub to: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCheck {
    /// Whether the stages run so far guarantee this property.
    pub expected: bool,
    #[serde(flatten)]
    pub report: ValidationReport,
}

impl StageCheck {
    /// An expected property that does not hold.
    pub fn violated(&self) -> bool {
        self.expected && !self.report.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: String,
    pub doctrine: String,
    pub objects: Vec<ObjectCensus>,
    pub homs: Vec<HomCensus>,
    pub checks: Vec<StageCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToposTrace {
    pub structure: Option<ToposStructure>,
    pub checks: Vec<ValidationReport>,
}

impl ToposTrace {
    pub fn passed(&self) -> bool {
        self.structure.is_some() && self.checks.iter().all(ValidationReport::passed)
    }
}

/// The run configuration as recorded in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    /// The model with file references inlined.
    pub spec: ModelSpec,
    pub stages: Vec<String>,
    pub max_size: usize,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub run: RunRecord,
    pub stages: Vec<StageTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topos: Option<ToposTrace>,
}

impl Trace {
    /// No expected property fails and the topos battery, if run, passes.
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| !s.checks.iter().any(StageCheck::violated))
            && self.topos.as_ref().is_none_or(ToposTrace::passed)
    }

    pub fn stage(&self, name: &str) -> Option<&StageTrace> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }
}

fn census(d: &dyn Doctrine, objs: &[(String, Obj)], budget: &Budget) -> Result<(Vec<ObjectCensus>, Vec<HomCensus>)> {
    let mut objects = Vec::new();
    for (b, o) in objs {
        objects.push(ObjectCensus {
            base: b.clone(),
            object: o.to_string(),
            carrier: o.carrier(),
            fiber: d.fiber(o, budget)?.len(),
        });
    }
    let mut homs = Vec::new();
    for (bx, x) in objs {
        for (by, y) in objs {
            homs.push(HomCensus {
                from: bx.clone(),
                to: by.clone(),
                count: d.hom(x, y, budget)?.len(),
            });
        }
    }
    Ok((objects, homs))
}

/// The registered fragment after the first `n` stages: the images of
/// `base` and, once the quotient stage has run, the indiscrete quotient `A/⊤`
/// of every base object with more than one point.
pub fn stage_fragment(p: &Pipeline, base: &[Obj], n: usize) -> Result<Vec<(String, Obj)>> {
    let mut frag = Vec::new();
    for a in base {
        frag.push((a.to_string(), p.embed_upto(a, n)?));
    }
    if let Some(iq) = p.stages[..n].iter().position(|s| s.kind == Kind::Q) {
        let inner = if iq == 0 { &p.input } else { &p.stages[iq - 1].doctrine };
        for a in base.iter().filter(|a| a.carrier() > 1) {
            let x = p.embed_upto(a, iq)?;
            let top = inner.top(&inner.product(&x, &x).obj);
            let mut o = QuotientCompletion::object(&x, &top);
            for s in &p.stages[iq + 1..n] {
                o = s.unit.map_obj(&o)?;
            }
            frag.push((format!("{a}/⊤"), o));
        }
    }
    Ok(frag)
}

/// Runs `kinds` on `input`, recording the census of [`stage_fragment`] and
/// the four completeness checks after every stage; with `topos`, also the
/// topos battery on the images of `base` in the output.
pub fn trace_pipeline(
    input: Arc<dyn Doctrine>,
    base: &[Obj],
    kinds: &[Kind],
    topos: bool,
    run: RunRecord,
    budget: &Budget,
) -> Result<(Pipeline, Trace)> {
    let p = Pipeline::run(input, kinds);
    let mut stages = Vec::new();
    let frag = stage_fragment(&p, base, 0)?;
    let (objects, homs) = census(p.input.as_ref(), &frag, budget)?;
    stages.push(StageTrace {
        stage: "input".into(),
        doctrine: p.input.name(),
        objects,
        homs,
        checks: Vec::new(),
    });
    for (n, s) in p.stages.iter().enumerate() {
        let frag = stage_fragment(&p, base, n + 1)?;
        let objs: Vec<Obj> = frag.iter().map(|(_, o)| o.clone()).collect();
        let d = s.doctrine.as_ref();
        let (objects, homs) = census(d, &frag, budget)?;
        let mut checks = Vec::new();
        for kind in Kind::PIPELINE {
            checks.push(StageCheck {
                expected: kinds[..=n].contains(&kind),
                report: check_complete(kind, d, &objs, budget)?,
            });
        }
        stages.push(StageTrace {
            stage: s.kind.key().into(),
            doctrine: d.name(),
            objects,
            homs,
            checks,
        });
    }
    let topos = if topos {
        let objs: Vec<Obj> = base.iter().map(|a| p.embed(a)).collect::<Result<_>>()?;
        let cfg = ToposConfig {
            objects: objs.clone(),
            power_objects: objs.clone(),
            classified: objs,
            budget: *budget,
        };
        let (structure, bat) = check_topos(p.output(), &cfg)?;
        Some(ToposTrace {
            structure,
            checks: bat.reports,
        })
    } else {
        None
    };
    Ok((p, Trace { run, stages, topos }))
}

pub fn render_human(t: &Trace) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "model {}  stages [{}]  max-size {}  budget {}",
        t.run.model,
        t.run.stages.join(","),
        t.run.max_size,
        t.run.budget
    );
    for st in &t.stages {
        let _ = writeln!(s, "== stage {} ({}) ==", st.stage, st.doctrine);
        for o in &st.objects {
            let _ = writeln!(s, "  object {} ↦ {}  carrier {}  fiber {}", o.base, o.object, o.carrier, o.fiber);
        }
        for h in &st.homs {
            let _ = writeln!(s, "  |hom({},{})| = {}", h.from, h.to, h.count);
        }
        for c in &st.checks {
            let tag = if c.expected { "expected" } else { "informational" };
            let _ = writeln!(s, "  {tag} {}", c.report.to_string().replace('\n', "\n  "));
        }
    }
    if let Some(tp) = &t.topos {
        let _ = writeln!(s, "== topos ==");
        match &tp.structure {
            Some(ts) => {
                let _ = writeln!(s, "  terminal {}", ts.terminal);
                for (a, pa, n) in &ts.powers {
                    let _ = writeln!(s, "  𝒫{a} = {pa}  global points {n}");
                }
            }
            None => {
                let _ = writeln!(s, "  assembly refused");
            }
        }
        for r in &tp.checks {
            let _ = writeln!(s, "  {}", r.to_string().replace('\n', "\n  "));
        }
    }
    let _ = writeln!(s, "result: {}", if t.passed() { "PASS" } else { "FAIL" });
    s
}

/// Objects and hom tables of a registered fragment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub category: String,
    pub objects: Vec<FragmentObject>,
    pub homs: Vec<HomTable>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentObject {
    pub label: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomTable {
    pub from: String,
    pub to: String,
    pub morphisms: Vec<String>,
}

/// `objs` pairs a display label with each registered object.
pub fn fragment(c: &dyn Category, objs: &[(String, Obj)], budget: &Budget) -> Result<Fragment> {
    let mut homs = Vec::new();
    for (lx, x) in objs {
        for (ly, y) in objs {
            homs.push(HomTable {
                from: lx.clone(),
                to: ly.clone(),
                morphisms: c.hom(x, y, budget)?.iter().map(|m| m.to_string()).collect(),
            });
        }
    }
    Ok(Fragment {
        category: c.name(),
        objects: objs
            .iter()
            .map(|(l, o)| FragmentObject {
                label: l.clone(),
                object: o.to_string(),
            })
            .collect(),
        homs,
    })
}

impl Fragment {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fragment serializes");
        s.push('\n');
        s
    }

    /// One node per object, one edge per nonempty hom-set labelled with its size.
    pub fn to_dot(&self) -> String {
        let q = |x: &str| format!("\"{}\"", x.replace('\\', "\\\\").replace('"', "\\\""));
        let mut s = String::new();
        let _ = writeln!(s, "digraph {} {{", q(&self.category));
        for (i, o) in self.objects.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label={}, tooltip={}];", q(&o.label), q(&o.object));
        }
        let index = |l: &str| self.objects.iter().position(|o| o.label == l).unwrap_or(0);
        for h in &self.homs {
            if !h.morphisms.is_empty() {
                let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", index(&h.from), index(&h.to), h.morphisms.len());
            }
        }
        s.push_str("}\n");
        s
    }
}
