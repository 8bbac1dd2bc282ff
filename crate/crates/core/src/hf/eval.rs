//! Evaluation of host terms over hereditarily finite sets.
//!
//! Catalog definitions are unfolded; axiomatized constants of the list and ordinal
//! fragment have native models. `tag` is `x ↦ {x}` and `untag` takes the sole element.
//! `arity`, `vararity` and `domseq` are fixed stub relations so that the
//! relation-level definitions can be exercised.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use thiserror::Error;

use super::Hf;
use crate::host::catalog::{self, EntryKind};
use crate::host::{HostTerm, HostType};

pub const DEFAULT_FUEL: u64 = 1_000_000;
/// Separation over `omega` examines the ordinals below this bound.
pub const DEFAULT_OMEGA_HORIZON: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("not evaluable: {0}")]
    NotEvaluable(String),
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("ill-typed value: {0}")]
    Type(String),
}

#[derive(Clone)]
pub enum Value {
    Set(Hf),
    Prop(bool),
    Fun(Rc<Func>),
}

impl std::fmt::Debug for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Set(h) => write!(f, "{h}"),
            Value::Prop(b) => write!(f, "{b}"),
            Value::Fun(func) => match &**func {
                Func::Table(t) => write!(f, "{t:?}"),
                Func::Closure { var, .. } => write!(f, "<λ{var}>"),
                Func::Native { op, args } => write!(f, "<{op:?}/{}>", args.len()),
            },
        }
    }
}

impl Value {
    pub fn table(t: BTreeMap<Hf, Hf>) -> Value {
        Value::Fun(Rc::new(Func::Table(t)))
    }

    fn set(&self) -> Result<Hf, EvalError> {
        match self {
            Value::Set(h) => Ok(*h),
            other => Err(EvalError::Type(format!("expected a set, found {other:?}"))),
        }
    }

    fn prop(&self) -> Result<bool, EvalError> {
        match self {
            Value::Prop(b) => Ok(*b),
            other => Err(EvalError::Type(format!("expected a proposition, found {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Native {
    Power,
    Ordsucc,
    OrdAdd,
    OrdMul,
    OrdExp,
    OrdSub,
    Tag,
    Untag,
    Cons,
    Listset,
    In,
    Vararity,
    Arity,
    Domseq,
}

impl Native {
    fn of(name: &str) -> Option<Native> {
        Some(match name {
            "power" => Native::Power,
            "ordsucc" => Native::Ordsucc,
            "ord_add" => Native::OrdAdd,
            "ord_mul" => Native::OrdMul,
            "ord_exp" => Native::OrdExp,
            "ord_sub" => Native::OrdSub,
            "tag" => Native::Tag,
            "untag" => Native::Untag,
            "cons" => Native::Cons,
            "listset" => Native::Listset,
            "in" => Native::In,
            "vararity" => Native::Vararity,
            "arity" => Native::Arity,
            "domseq" => Native::Domseq,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Native::Power
            | Native::Ordsucc
            | Native::Tag
            | Native::Untag
            | Native::Listset
            | Native::Vararity
            | Native::Arity => 1,
            Native::Cons => 3,
            _ => 2,
        }
    }
}

struct Frame {
    name: String,
    value: Value,
    next: Env,
}

#[derive(Clone, Default)]
pub struct Env(Option<Rc<Frame>>);

impl Env {
    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(Frame {
            name: name.to_string(),
            value,
            next: self.clone(),
        })))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(f) = cur {
            if f.name == name {
                return Some(&f.value);
            }
            cur = &f.next.0;
        }
        None
    }
}

pub enum Func {
    Closure { var: String, body: Rc<HostTerm>, env: Env },
    Native { op: Native, args: Vec<Value> },
    /// Finite support; `∅` elsewhere.
    Table(BTreeMap<Hf, Hf>),
}

/// Values that otherwise unbounded quantifiers range over.
#[derive(Clone, Default)]
pub struct Domain {
    pub sets: Vec<Hf>,
    pub lists: Vec<Value>,
}

pub struct Evaluator {
    fuel: u64,
    pub fuel_limit: u64,
    pub omega_horizon: u32,
    pub domain: Option<Rc<Domain>>,
    defs: HashMap<String, Rc<HostTerm>>,
    cache: HashMap<String, Value>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new()
    }
}

fn definitions() -> HashMap<String, Rc<HostTerm>> {
    let mut defs = HashMap::new();
    for e in catalog::entries().iter().filter(|e| e.kind == EntryKind::Definition) {
        for p in e.premises() {
            if let HostTerm::Eq(_, lhs, rhs) = p.formula {
                if matches!(&*lhs, HostTerm::Const(c, _) if c == e.name) {
                    defs.insert(e.name.to_string(), Rc::new(*rhs));
                }
            }
        }
    }
    defs
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator {
            fuel: DEFAULT_FUEL,
            fuel_limit: DEFAULT_FUEL,
            omega_horizon: DEFAULT_OMEGA_HORIZON,
            domain: None,
            defs: definitions(),
            cache: HashMap::new(),
        }
    }

    /// Restores the full fuel budget.
    pub fn refuel(&mut self) {
        self.fuel = self.fuel_limit;
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval_closed(&mut self, t: &HostTerm) -> Result<Value, EvalError> {
        self.refuel();
        self.eval(t, &Env::default())
    }

    pub fn eval_prop(&mut self, t: &HostTerm, env: &Env) -> Result<bool, EvalError> {
        self.eval(t, env)?.prop()
    }

    pub fn eval(&mut self, t: &HostTerm, env: &Env) -> Result<Value, EvalError> {
        use HostTerm::*;
        self.tick()?;
        Ok(match t {
            Var(x, _) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| EvalError::NotEvaluable(format!("free variable {x}")))?,
            Const(c, _) => self.constant(c)?,
            App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)?
            }
            Lam(x, _, body) => Value::Fun(Rc::new(Func::Closure {
                var: x.clone(),
                body: Rc::new((**body).clone()),
                env: env.clone(),
            })),
            Bot => Value::Prop(false),
            Top => Value::Prop(true),
            Not(a) => Value::Prop(!self.eval_prop(a, env)?),
            Imp(a, b) => Value::Prop(!self.eval_prop(a, env)? || self.eval_prop(b, env)?),
            And(a, b) => Value::Prop(self.eval_prop(a, env)? && self.eval_prop(b, env)?),
            Or(a, b) => Value::Prop(self.eval_prop(a, env)? || self.eval_prop(b, env)?),
            Iff(a, b) => Value::Prop(self.eval_prop(a, env)? == self.eval_prop(b, env)?),
            Eq(_, a, b) => {
                let (x, y) = (self.eval(a, env)?, self.eval(b, env)?);
                Value::Prop(match (x, y) {
                    (Value::Set(p), Value::Set(q)) => p == q,
                    (Value::Prop(p), Value::Prop(q)) => p == q,
                    _ => return Err(EvalError::NotEvaluable(format!("equality of functions in {t}"))),
                })
            }
            All(x, ty, body) => Value::Prop(self.quantify(true, x, ty, body, env, t)?),
            Ex(x, ty, body) => Value::Prop(self.quantify(false, x, ty, body, env, t)?),
            Mem(a, b) => {
                let x = self.eval(a, env)?.set()?;
                if is_const(b, "omega") {
                    Value::Prop(x.as_ordinal().is_some())
                } else {
                    Value::Prop(self.eval(b, env)?.set()?.contains(x))
                }
            }
            Subq(a, b) => {
                let (x, y) = (self.eval(a, env)?.set()?, self.eval(b, env)?.set()?);
                Value::Prop(x.subset_of(y))
            }
            Sep(x, set, body) => {
                let candidates = if is_const(set, "omega") {
                    (0..self.omega_horizon).map(Hf::ordinal).collect()
                } else {
                    self.eval(set, env)?.set()?.elems()
                };
                let mut keep = Vec::new();
                for c in candidates {
                    if self.eval_prop(body, &env.bind(x, Value::Set(c)))? {
                        keep.push(c);
                    }
                }
                Value::Set(Hf::set(keep))
            }
            If(c, a, b) => {
                if self.eval_prop(c, env)? {
                    self.eval(a, env)?
                } else {
                    self.eval(b, env)?
                }
            }
        })
    }

    fn quantify(
        &mut self,
        universal: bool,
        x: &str,
        ty: &HostType,
        body: &HostTerm,
        env: &Env,
        whole: &HostTerm,
    ) -> Result<bool, EvalError> {
        let values: Vec<Value> = match ty {
            HostType::Omicron => vec![Value::Prop(false), Value::Prop(true)],
            _ => match self.bound_of(universal, x, ty, body, env)? {
                Some(vs) => vs,
                None => match (&self.domain, ty) {
                    (Some(d), HostType::Iota) => d.sets.iter().map(|h| Value::Set(*h)).collect(),
                    (Some(d), t) if *t == HostType::list() => d.lists.clone(),
                    _ => return Err(EvalError::NotEvaluable(format!("unbounded quantifier in {whole}"))),
                },
            },
        };
        for v in values {
            let holds = self.eval_prop(body, &env.bind(x, v))?;
            if holds != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    /// Elements of `S` when the body reads `x ∈ S → …` (universal) or `x ∈ S ∧ …`.
    fn bound_of(
        &mut self,
        universal: bool,
        x: &str,
        ty: &HostType,
        body: &HostTerm,
        env: &Env,
    ) -> Result<Option<Vec<Value>>, EvalError> {
        if *ty != HostType::Iota {
            return Ok(None);
        }
        let guard = match (universal, body) {
            (true, HostTerm::Imp(g, _)) | (false, HostTerm::And(g, _)) => g,
            _ => return Ok(None),
        };
        let HostTerm::Mem(v, s) = &**guard else { return Ok(None) };
        if !matches!(&**v, HostTerm::Var(n, _) if n == x) || s.free_vars().iter().any(|(n, _)| n == x) {
            return Ok(None);
        }
        if is_const(s, "omega") {
            return Ok(None);
        }
        let set = self.eval(s, env)?.set()?;
        Ok(Some(set.elems().into_iter().map(Value::Set).collect()))
    }

    fn constant(&mut self, c: &str) -> Result<Value, EvalError> {
        if let Some(v) = self.cache.get(c) {
            return Ok(v.clone());
        }
        let v = if let Some(body) = self.defs.get(c).cloned() {
            self.eval(&body, &Env::default())?
        } else if c == "emptyset" {
            Value::Set(Hf::empty())
        } else if let Some(op) = Native::of(c) {
            Value::Fun(Rc::new(Func::Native { op, args: Vec::new() }))
        } else {
            return Err(EvalError::NotEvaluable(c.to_string()));
        };
        self.cache.insert(c.to_string(), v.clone());
        Ok(v)
    }

    pub fn apply(&mut self, f: &Value, arg: Value) -> Result<Value, EvalError> {
        self.tick()?;
        let Value::Fun(func) = f else {
            return Err(EvalError::Type(format!("applying a non-function {f:?}")));
        };
        match &**func {
            Func::Closure { var, body, env } => {
                let env = env.bind(var, arg);
                let body = body.clone();
                self.eval(&body, &env)
            }
            Func::Table(t) => Ok(Value::Set(t.get(&arg.set()?).copied().unwrap_or_else(Hf::empty))),
            Func::Native { op, args } => {
                let mut args = args.clone();
                args.push(arg);
                if args.len() == op.arity() {
                    self.native(*op, &args)
                } else {
                    Ok(Value::Fun(Rc::new(Func::Native { op: *op, args })))
                }
            }
        }
    }

    fn ordinal_arg(v: &Value, op: Native) -> Result<Hf, EvalError> {
        let h = v.set()?;
        match h.as_ordinal() {
            Some(_) => Ok(h),
            None => Err(EvalError::NotEvaluable(format!("{op:?} of the non-ordinal {h}"))),
        }
    }

    fn ord_add(&mut self, m: Hf, n: Hf) -> Result<Hf, EvalError> {
        self.tick()?;
        match n.pred() {
            None => Ok(m),
            Some(p) => Ok(self.ord_add(m, p)?.succ()),
        }
    }

    fn ord_mul(&mut self, m: Hf, n: Hf) -> Result<Hf, EvalError> {
        self.tick()?;
        match n.pred() {
            None => Ok(Hf::empty()),
            Some(p) => {
                let k = self.ord_mul(m, p)?;
                self.ord_add(k, m)
            }
        }
    }

    fn ord_exp(&mut self, m: Hf, n: Hf) -> Result<Hf, EvalError> {
        self.tick()?;
        match n.pred() {
            None => Ok(Hf::ordinal(1)),
            Some(p) => {
                let k = self.ord_exp(m, p)?;
                self.ord_mul(k, m)
            }
        }
    }

    fn ord_sub(&mut self, m: Hf, n: Hf) -> Result<Hf, EvalError> {
        self.tick()?;
        match n.pred() {
            None => Ok(m),
            Some(p) => {
                let k = self.ord_sub(m, p)?;
                Ok(k.pred().unwrap_or(k))
            }
        }
    }

    fn native(&mut self, op: Native, args: &[Value]) -> Result<Value, EvalError> {
        let set = |k: usize| args[k].set();
        Ok(match op {
            Native::Power => {
                let elems = set(0)?.elems();
                if elems.len() > 12 {
                    return Err(EvalError::NotEvaluable(format!("power set of {} elements", elems.len())));
                }
                let n = elems.len();
                Value::Set(Hf::set(
                    (0u32..1 << n).map(|mask| Hf::set((0..n).filter(|k| mask >> k & 1 == 1).map(|k| elems[k]))),
                ))
            }
            Native::Ordsucc => Value::Set(set(0)?.succ()),
            Native::OrdAdd | Native::OrdMul | Native::OrdExp | Native::OrdSub => {
                let m = Self::ordinal_arg(&args[0], op)?;
                let n = Self::ordinal_arg(&args[1], op)?;
                Value::Set(match op {
                    Native::OrdAdd => self.ord_add(m, n)?,
                    Native::OrdMul => self.ord_mul(m, n)?,
                    Native::OrdExp => self.ord_exp(m, n)?,
                    _ => self.ord_sub(m, n)?,
                })
            }
            Native::Tag => Value::Set(Hf::singleton(set(0)?)),
            Native::Untag => Value::Set(set(0)?.sole().unwrap_or_else(Hf::empty)),
            Native::Cons => {
                let i = set(2)?;
                if i.is_empty() {
                    Value::Set(Hf::singleton(set(0)?))
                } else if let (Some(_), Some(p)) = (i.as_ordinal(), i.pred()) {
                    self.apply(&args[1], Value::Set(p))?
                } else {
                    Value::Set(Hf::empty())
                }
            }
            Native::Listset => {
                let mut graph = Vec::new();
                for k in 0..self.omega_horizon {
                    let i = Hf::ordinal(k);
                    let v = self.apply(&args[0], Value::Set(i))?.set()?;
                    if !v.is_empty() {
                        graph.push(Hf::kpair(i, v));
                    }
                }
                Value::Set(Hf::set(graph))
            }
            Native::In => Value::Prop(set(1)?.contains(set(0)?)),
            Native::Vararity => Value::Prop(set(0)?.contains(Hf::empty())),
            Native::Arity => Value::Set(Hf::ordinal((set(0)?.card() % 3) as u32)),
            Native::Domseq => Value::Set(Hf::pair(set(0)?, set(1)?)),
        })
    }
}

fn is_const(t: &HostTerm, name: &str) -> bool {
    matches!(t, HostTerm::Const(c, _) if c == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::{self, call, cst, ivar, mk_list};

    fn set_of(t: &HostTerm) -> Hf {
        Evaluator::new().eval_closed(t).unwrap().set().unwrap()
    }

    #[test]
    fn numerals_and_lists() {
        assert_eq!(set_of(&cst("n7")), Hf::ordinal(7));
        assert_eq!(set_of(&call("len", [cst("nil")])), Hf::ordinal(0));
        let l = mk_list(vec![cst("n3"), cst("n5")]).unwrap();
        assert_eq!(set_of(&call("len", [l.clone()])), Hf::ordinal(2));
        // mk_list([a,b]) at index 0 is the tag of a
        assert_eq!(set_of(&host::app(l.clone(), cst("n0"))), set_of(&call("tag", [cst("n3")])));
        assert_eq!(set_of(&host::app(l, cst("n2"))), Hf::empty());
    }

    #[test]
    fn digit_polynomial_value() {
        assert_eq!(set_of(&host::numeral(12)), Hf::ordinal(12));
        assert_eq!(set_of(&host::numeral(105)), Hf::ordinal(105));
    }

    #[test]
    fn coercions() {
        let mut ev = Evaluator::new();
        let p = host::prop_of(host::bool_of(HostTerm::Top));
        assert_eq!(ev.eval_closed(&p).unwrap().prop(), Ok(true));
        let p = host::prop_of(host::bool_of(HostTerm::Bot));
        assert_eq!(ev.eval_closed(&p).unwrap().prop(), Ok(false));
    }

    #[test]
    fn not_evaluable() {
        let mut ev = Evaluator::new();
        for t in [cst("univ1"), cst("reals"), host::iota_const("s_Planet")] {
            assert!(matches!(ev.eval_closed(&t), Err(EvalError::NotEvaluable(_))));
        }
        let t = host::all("x", HostType::Iota, host::mem(ivar("x"), ivar("x")));
        assert!(matches!(ev.eval_closed(&t), Err(EvalError::NotEvaluable(_))));
    }

    #[test]
    fn fuel() {
        let mut ev = Evaluator::new();
        ev.fuel_limit = 10;
        let t = call("len", [mk_list(vec![cst("n1"), cst("n2")]).unwrap()]);
        assert_eq!(ev.eval_closed(&t).unwrap_err(), EvalError::FuelExhausted);
    }

    #[test]
    fn bounded_quantifiers() {
        let mut ev = Evaluator::new();
        let t = host::all(
            "x",
            HostType::Iota,
            host::imp(host::mem(ivar("x"), cst("n4")), host::mem(ivar("x"), cst("n5"))),
        );
        assert_eq!(ev.eval_closed(&t).unwrap().prop(), Ok(true));
        let t = host::ex(
            "x",
            HostType::Iota,
            host::and(host::mem(ivar("x"), cst("n4")), host::eq_i(ivar("x"), cst("n4"))),
        );
        assert_eq!(ev.eval_closed(&t).unwrap().prop(), Ok(false));
    }
}
