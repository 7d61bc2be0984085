//! Completions and model builders registered by name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{Budget, Obj};
use crate::completeness::check_complete;
use crate::completions::{complete, Extension, Kind, Pipeline, Stage};
use crate::controls::BrokenExists;
use crate::doctrine::Doctrine;
use crate::error::{Error, Result};
use crate::format::{parse_algebra, AlgebraDocument};
use crate::lattice::HeytingAlgebra;
use crate::models::{HValuedTripos, SubsetTripos};
use crate::morphism::DoctrineMorphism;
use crate::report::ValidationReport;
use crate::subobject::SubobjectDoctrine;

pub trait Completion: Send + Sync {
    fn kind(&self) -> Kind;

    fn describe(&self) -> &'static str;

    fn key(&self) -> &'static str {
        self.kind().key()
    }

    fn apply(&self, d: Arc<dyn Doctrine>) -> Stage {
        complete(self.kind(), d)
    }

    fn check_complete(&self, d: &dyn Doctrine, objs: &[Obj], budget: &Budget) -> Result<ValidationReport> {
        check_complete(self.kind(), d, objs, budget)
    }

    /// Extension of `m` along the unit of `stage`.
    fn extend(
        &self,
        stage: &Stage,
        m: Arc<dyn DoctrineMorphism>,
        objs: &[Obj],
        budget: &Budget,
    ) -> Result<Extension> {
        Extension::new(self.kind(), stage.doctrine.clone(), m, objs, budget)
    }
}

struct Free(Kind, &'static str);

impl Completion for Free {
    fn kind(&self) -> Kind {
        self.0
    }
    fn describe(&self) -> &'static str {
        self.1
    }
}

/// A model document.
///
/// `algebra` and `source` accept `builtin:NAME`, an inline algebra document
/// (anything containing a newline), or a path relative to the document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    /// For `subobject`: `finset-subset` or an algebra reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Negative control: `exists` corrupts the ∃ table of the built doctrine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt: Option<String>,
}

impl ModelSpec {
    pub fn new(kind: &str) -> Self {
        ModelSpec {
            kind: kind.into(),
            algebra: None,
            source: None,
            corrupt: None,
        }
    }

    /// The same spec with every file reference replaced by the file's text,
    /// so the result no longer depends on the working directory.
    pub fn inlined(&self, base_dir: Option<&Path>) -> Result<ModelSpec> {
        let inline = |r: &Option<String>| -> Result<Option<String>> {
            Ok(match r.as_deref() {
                Some(x) if x.starts_with("builtin:") || x.contains('\n') || x == "finset-subset" => Some(x.to_string()),
                Some(x) => Some(read_reference(x, base_dir)?),
                None => None,
            })
        };
        Ok(ModelSpec {
            kind: self.kind.clone(),
            algebra: inline(&self.algebra)?,
            source: inline(&self.source)?,
            corrupt: self.corrupt.clone(),
        })
    }

    pub fn h_valued(algebra: &str) -> Self {
        ModelSpec {
            algebra: Some(algebra.into()),
            ..Self::new("h-valued")
        }
    }
}

/// Where relative paths resolve and how large the registered fragment is.
#[derive(Debug, Clone)]
pub struct BuildContext {
    pub base_dir: Option<PathBuf>,
    pub max_size: usize,
    pub budget: Budget,
}

impl Default for BuildContext {
    fn default() -> Self {
        BuildContext {
            base_dir: None,
            max_size: 3,
            budget: Budget::default(),
        }
    }
}

/// A loaded algebra reference: either validated or the parsed document
/// that failed validation.
pub enum LoadedAlgebra {
    Valid(HeytingAlgebra),
    Invalid(AlgebraDocument, ValidationReport),
}

fn read_reference(reference: &str, base_dir: Option<&Path>) -> Result<String> {
    let path = match base_dir {
        Some(dir) => dir.join(reference),
        None => PathBuf::from(reference),
    };
    std::fs::read_to_string(&path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn load_algebra_ref(reference: &str, base_dir: Option<&Path>) -> Result<LoadedAlgebra> {
    if let Some(name) = reference.strip_prefix("builtin:") {
        return HeytingAlgebra::builtin(name)
            .map(LoadedAlgebra::Valid)
            .ok_or_else(|| Error::Invalid(format!("unknown builtin algebra `{name}`")));
    }
    let text = if reference.contains('\n') {
        reference.to_string()
    } else {
        read_reference(reference, base_dir)?
    };
    let doc = parse_algebra(&text)?;
    let report = doc.validate();
    if !report.passed() {
        return Ok(LoadedAlgebra::Invalid(doc, report));
    }
    Ok(LoadedAlgebra::Valid(doc.build()?))
}

/// A doctrine together with its registered objects.
#[derive(Clone)]
pub struct Model {
    pub doctrine: Arc<dyn Doctrine>,
    pub objects: Vec<Obj>,
    /// Whether the doctrine is a tripos that can enter the pipeline.
    pub tripos: bool,
}

/// Outcome of building a model: a failing algebra is a check failure, not an
/// input error.
pub enum Built {
    Model(Model),
    InvalidAlgebra(ValidationReport),
}

pub trait ModelBuilder: Send + Sync {
    fn key(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn build(&self, spec: &ModelSpec, ctx: &BuildContext) -> Result<Built>;
}

fn base_objects(max: usize) -> Vec<Obj> {
    (1..=max).map(Obj::finite).collect()
}

fn algebra_of(reference: Option<&str>, ctx: &BuildContext) -> Result<std::result::Result<HeytingAlgebra, ValidationReport>> {
    let reference = reference.ok_or_else(|| Error::Invalid("missing `algebra`".into()))?;
    Ok(match load_algebra_ref(reference, ctx.base_dir.as_deref())? {
        LoadedAlgebra::Valid(h) => Ok(h),
        LoadedAlgebra::Invalid(_, r) => Err(r),
    })
}

struct SubsetBuilder;

impl ModelBuilder for SubsetBuilder {
    fn key(&self) -> &'static str {
        "finset-subset"
    }
    fn describe(&self) -> &'static str {
        "subsets of finite sets"
    }
    fn build(&self, _spec: &ModelSpec, ctx: &BuildContext) -> Result<Built> {
        Ok(Built::Model(Model {
            doctrine: Arc::new(SubsetTripos::new()),
            objects: base_objects(ctx.max_size),
            tripos: true,
        }))
    }
}

struct HValuedBuilder;

impl ModelBuilder for HValuedBuilder {
    fn key(&self) -> &'static str {
        "h-valued"
    }
    fn describe(&self) -> &'static str {
        "functions into a finite Heyting algebra"
    }
    fn build(&self, spec: &ModelSpec, ctx: &BuildContext) -> Result<Built> {
        Ok(match algebra_of(spec.algebra.as_deref(), ctx)? {
            Ok(h) => Built::Model(Model {
                doctrine: Arc::new(HValuedTripos::new(h)),
                objects: base_objects(ctx.max_size),
                tripos: true,
            }),
            Err(r) => Built::InvalidAlgebra(r),
        })
    }
}

struct SubobjectBuilder;

impl ModelBuilder for SubobjectBuilder {
    fn key(&self) -> &'static str {
        "subobject"
    }
    fn describe(&self) -> &'static str {
        "subobjects in the completed category of a source tripos"
    }
    fn build(&self, spec: &ModelSpec, ctx: &BuildContext) -> Result<Built> {
        let source = spec.source.as_deref().unwrap_or("finset-subset");
        let (origin, objects): (Arc<dyn Doctrine>, Vec<Obj>) = if source == "finset-subset" {
            (Arc::new(SubsetTripos::new()), base_objects(ctx.max_size))
        } else {
            let h = match algebra_of(Some(source), ctx)? {
                Ok(h) => h,
                Err(r) => return Ok(Built::InvalidAlgebra(r)),
            };
            let p = Pipeline::tripos_to_topos(Arc::new(HValuedTripos::new(h)));
            let objs = base_objects(ctx.max_size).iter().map(|a| p.embed(a)).collect::<Result<_>>()?;
            (p.output().clone(), objs)
        };
        Ok(Built::Model(Model {
            doctrine: Arc::new(SubobjectDoctrine::new(origin, objects.clone(), ctx.budget)),
            objects,
            tripos: false,
        }))
    }
}

pub struct Registry {
    completions: BTreeMap<&'static str, Box<dyn Completion>>,
    models: BTreeMap<&'static str, Box<dyn ModelBuilder>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            completions: BTreeMap::new(),
            models: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register_completion(Box::new(Free(Kind::C, "full comprehensions")));
        r.register_completion(Box::new(Free(Kind::Q, "effective quotients")));
        r.register_completion(Box::new(Free(Kind::E, "extensional collapse")));
        r.register_completion(Box::new(Free(Kind::L, "cauchy completion")));
        r.register_model(Box::new(SubsetBuilder));
        r.register_model(Box::new(HValuedBuilder));
        r.register_model(Box::new(SubobjectBuilder));
        r
    }

    pub fn register_completion(&mut self, c: Box<dyn Completion>) {
        self.completions.insert(c.key(), c);
    }

    pub fn register_model(&mut self, m: Box<dyn ModelBuilder>) {
        self.models.insert(m.key(), m);
    }

    pub fn completion(&self, key: &str) -> Result<&dyn Completion> {
        self.completions
            .get(key)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Invalid(format!("unknown completion `{key}`")))
    }

    pub fn model(&self, key: &str) -> Result<&dyn ModelBuilder> {
        self.models
            .get(key)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::Invalid(format!("unknown model kind `{key}`")))
    }

    pub fn completions(&self) -> impl Iterator<Item = &dyn Completion> {
        self.completions.values().map(|c| c.as_ref())
    }

    pub fn models(&self) -> impl Iterator<Item = &dyn ModelBuilder> {
        self.models.values().map(|m| m.as_ref())
    }

    pub fn build(&self, spec: &ModelSpec, ctx: &BuildContext) -> Result<Built> {
        let built = self.model(&spec.kind)?.build(spec, ctx)?;
        match (spec.corrupt.as_deref(), built) {
            (None, b) => Ok(b),
            (Some("exists"), Built::Model(m)) => Ok(Built::Model(Model {
                doctrine: Arc::new(BrokenExists::new(m.doctrine)),
                ..m
            })),
            (Some("exists"), b) => Ok(b),
            (Some(other), _) => Err(Error::Invalid(format!("unknown corruption `{other}`"))),
        }
    }

    /// Applies the named completions in order.
    pub fn pipeline(&self, input: Arc<dyn Doctrine>, keys: &[&str]) -> Result<Pipeline> {
        let kinds: Vec<Kind> = keys.iter().map(|k| self.completion(k).map(|c| c.kind())).collect::<Result<_>>()?;
        Ok(Pipeline::run(input, &kinds))
    }
}
