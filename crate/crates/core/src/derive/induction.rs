//! Induction schemes for (possibly nested) inductive types.
//!
//! Nested recursive occurrences such as `l : list (brtree A n)` are handled
//! through the unary parametricity translation of the container: `list`
//! yields `is_list A P l`, and the scheme's hypothesis for `Node` receives
//! `is_list (brtree A n) (p A n) l`. The proof term is an outer fixpoint on
//! the scrutinee whose nested witnesses are inner fixpoints over the
//! container values.

use std::collections::HashMap;
use std::rc::Rc;

use crate::kernel::whnf;
use crate::term::{
    alpha_eq, compose_lam, compose_prod, decompose_app, decompose_prod, decompose_prod_n, instantiate,
    instantiate_under, lift, mentions_global, mk_apps, occurs_rel, reindex, subst, suggest_name, Context, Decl,
    Definition, GlobalEnv, Ident, InductiveDecl, Name, Sort, Term,
};

use super::{finish_definition, finish_inductive, inductive_alpha_eq, DeriveError, DeriveResult, DerivedDef};

#[derive(Clone, Debug)]
pub struct SchemeRequest {
    pub ind: Ident,
    pub nested: bool,
    pub name: Ident,
}

impl SchemeRequest {
    /// Request with the default name `<ind>_ind_MC`.
    pub fn new(ind: &str, nested: bool) -> SchemeRequest {
        SchemeRequest {
            ind: ind.into(),
            nested,
            name: format!("{ind}_ind_MC").into(),
        }
    }
}

/// Outcome of a scheme derivation: translations it had to register first,
/// then the scheme itself.
#[derive(Clone, Debug)]
pub struct SchemeOutput {
    pub forced: Vec<DerivedDef>,
    pub scheme: DerivedDef,
}

pub fn translated_name(ind: &str) -> String {
    format!("is_{ind}")
}

fn is_sort_param(env: &GlobalEnv, decl: &InductiveDecl, j: usize) -> bool {
    let ctx = Context::from(decl.params.decls()[..j].to_vec());
    matches!(whnf(env, &ctx, &decl.params.decls()[j].ty), Term::Sort(_))
}

/// How the predicate of a recursive occurrence is written.
enum SelfPred {
    /// The scheme's motive variable at this level: `p params indices`.
    Motive { level: usize },
    /// The translation being built: `is_I params preds indices`.
    Translated {
        name: Ident,
        np: usize,
        pred_levels: Vec<usize>,
    },
}

struct PredCtx {
    self_ind: Ident,
    self_pred: SelfPred,
    /// Level of a predicated variable to the level of its predicate.
    var_preds: HashMap<usize, usize>,
}

struct Pred {
    term: Term,
    direct: bool,
}

struct Translator<'a> {
    env: &'a mut GlobalEnv,
    check: bool,
    /// When false, container occurrences get no predicate and no
    /// translation is registered.
    containers: bool,
    forced: &'a mut Vec<DerivedDef>,
}

impl Translator<'_> {
    fn relevant(&self, pc: &PredCtx, ctx: &Context, ty: &Term) -> bool {
        let d = ctx.len();
        mentions_global(ty, &pc.self_ind) || pc.var_preds.keys().any(|l| occurs_rel(ty, d - 1 - l))
    }

    /// The predicate `Q : ty -> Type` for values of `ty`, or `None` when
    /// `ty` involves neither the inductive nor a predicated variable.
    fn pred_of(&mut self, pc: &PredCtx, ctx: &Context, ty: &Term) -> DeriveResult<Option<Pred>> {
        if !self.relevant(pc, ctx, ty) {
            return Ok(None);
        }
        let d = ctx.len();
        let w = whnf(self.env, ctx, ty);
        let (head, args) = decompose_app(&w);
        match &head {
            Term::Rel(i) if args.is_empty() && pc.var_preds.contains_key(&(d - 1 - i)) => {
                let level = pc.var_preds[&(d - 1 - i)];
                Ok(Some(Pred {
                    term: Term::Rel(d - 1 - level),
                    direct: false,
                }))
            }
            Term::Ind(n) if *n == pc.self_ind => {
                let term = match &pc.self_pred {
                    SelfPred::Motive { level } => mk_apps(Term::Rel(d - 1 - level), args),
                    SelfPred::Translated { name, np, pred_levels } => mk_apps(
                        Term::Ind(name.clone()),
                        args[..*np]
                            .iter()
                            .cloned()
                            .chain(pred_levels.iter().map(|l| Term::Rel(d - 1 - l)))
                            .chain(args[*np..].iter().cloned()),
                    ),
                };
                Ok(Some(Pred { term, direct: true }))
            }
            Term::Ind(_) if !self.containers => Ok(None),
            Term::Ind(c) => {
                let decl = self
                    .env
                    .inductive(c)
                    .cloned()
                    .ok_or_else(|| DeriveError::UnknownInductive(c.to_string()))?;
                let np = decl.num_params();
                if args.len() != np + decl.num_indices() {
                    return Err(DeriveError::Unsupported(format!("partially applied container {c}")));
                }
                if args[np..].iter().any(|a| self.relevant(pc, ctx, a)) {
                    let msg = format!("recursive occurrence in an index of the container {c}");
                    return Err(DeriveError::Unsupported(msg));
                }
                let mut preds = Vec::new();
                let mut missing = false;
                for (j, a) in args[..np].iter().enumerate() {
                    if is_sort_param(self.env, &decl, j) {
                        match self.pred_of(pc, ctx, a)? {
                            Some(p) => preds.push(p.term),
                            None => missing = true,
                        }
                    } else if self.relevant(pc, ctx, a) {
                        let msg = format!("recursive occurrence in a non-type parameter of {c}");
                        return Err(DeriveError::Unsupported(msg));
                    }
                }
                if preds.is_empty() {
                    return Ok(None);
                }
                if missing {
                    let msg = format!("container {c} mixes recursive and unrelated type parameters");
                    return Err(DeriveError::Unsupported(msg));
                }
                let translated = self.translate(c)?;
                let term = mk_apps(
                    Term::Ind(translated.name.clone()),
                    args[..np].iter().cloned().chain(preds).chain(args[np..].iter().cloned()),
                );
                Ok(Some(Pred { term, direct: false }))
            }
            _ => Err(DeriveError::Unsupported(
                "recursive occurrence under a function type or in an untranslatable argument".into(),
            )),
        }
    }

    /// Registers (or finds) the translation of `ind`.
    fn translate(&mut self, ind: &str) -> DeriveResult<Rc<InductiveDecl>> {
        let src = self
            .env
            .inductive(ind)
            .cloned()
            .ok_or_else(|| DeriveError::UnknownInductive(ind.to_string()))?;
        let (decl, _) = self.translate_decl(&src)?;
        if let Some(existing) = self.env.inductive(&decl.name) {
            return if inductive_alpha_eq(existing, &decl) {
                Ok(existing.clone())
            } else {
                Err(DeriveError::NameClash(decl.name.to_string()))
            };
        }
        let def = finish_inductive(self.env, decl, self.check, Vec::new())?;
        let super::DerivedItem::Inductive(added) = &def.item else {
            unreachable!("finish_inductive yields an inductive")
        };
        let added = added.clone();
        self.forced.push(def);
        Ok(added)
    }

    /// Builds the translation of `src` and, per constructor, which source
    /// arguments are followed by a witness.
    fn translate_decl(&mut self, src: &InductiveDecl) -> DeriveResult<(InductiveDecl, Vec<Vec<bool>>)> {
        let np = src.num_params();
        let ni = src.num_indices();
        let name: Ident = translated_name(&src.name).into();
        let sort_params: Vec<usize> = (0..np).filter(|&j| is_sort_param(self.env, src, j)).collect();
        let npred = sort_params.len();

        let mut params = src.params.clone();
        let mut var_preds = HashMap::new();
        for (q, &j) in sort_params.iter().enumerate() {
            let depth = np + q;
            let pred_name = if npred == 1 {
                "P".to_string()
            } else {
                format!("P{}", src.params.decls()[j].name.as_str().unwrap_or("x"))
            };
            let ty = Term::prod(Name::Anonymous, Term::Rel(depth - 1 - j), Term::type0());
            params.push(Decl::new(Name::named(&pred_name), ty));
            var_preds.insert(j, np + q);
        }
        let pc = PredCtx {
            self_ind: src.name.clone(),
            self_pred: SelfPred::Translated {
                name: name.clone(),
                np,
                pred_levels: (np..np + npred).collect(),
            },
            var_preds,
        };

        let mut indices = Context::new();
        for (j, d) in src.indices.decls().iter().enumerate() {
            indices.push(Decl::new(d.name.clone(), lift(npred, j, &d.ty)));
        }
        let scrut_ty = mk_apps(
            Term::Ind(src.name.clone()),
            (0..np)
                .map(|l| Term::Rel(npred + ni + np - 1 - l))
                .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
        );
        let scrut_name = suggest_name(&scrut_ty, &[]);
        indices.push(Decl::new(Name::named(&scrut_name), scrut_ty));

        let mut ctors = Vec::new();
        let mut masks = Vec::new();
        for (ci, c) in src.ctors.iter().enumerate() {
            let mut ctx = params.clone();
            let mut map: Vec<usize> = (0..np).collect();
            let mut tele = Vec::new();
            let mut mask = Vec::new();
            let (ctele, concl) = decompose_prod(&c.ty);
            for (i, arg) in ctele.decls().iter().enumerate() {
                let ty = reindex(&arg.ty, np + i, ctx.len(), &map);
                let pred = self.pred_of(&pc, &ctx, &ty)?;
                let decl = Decl::new(arg.name.clone(), ty);
                ctx.push(decl.clone());
                tele.push(decl);
                map.push(ctx.len() - 1);
                if let Some(p) = pred {
                    let w = Decl::new(Name::Anonymous, Term::app(lift(1, 0, &p.term), Term::Rel(0)));
                    ctx.push(w.clone());
                    tele.push(w);
                }
                mask.push(ctx.len() - 1 != map[np + i]);
            }
            let concl = reindex(&concl, np + ctele.len(), ctx.len(), &map);
            let (_, cargs) = decompose_app(&concl);
            let d = ctx.len();
            let value = mk_apps(
                Term::Construct(src.name.clone(), ci),
                map.iter().map(|l| Term::Rel(d - 1 - l)),
            );
            let result = mk_apps(
                Term::Ind(name.clone()),
                (0..np + npred)
                    .map(|l| Term::Rel(d - 1 - l))
                    .chain(cargs[np..].iter().cloned())
                    .chain(std::iter::once(value)),
            );
            ctors.push(crate::term::ConstructorDecl {
                name: translated_name(&c.name).into(),
                ty: compose_prod(&tele, result),
            });
            masks.push(mask);
        }
        let sort = match src.sort {
            Sort::Prop => Sort::Type(0),
            s => s,
        };
        Ok((
            InductiveDecl {
                name,
                params,
                indices,
                sort,
                ctors,
            },
            masks,
        ))
    }
}

/// The unary parametricity translation `is_<ind>` of `ind`, registering it
/// (and any translation it depends on) in `env` unless already present.
/// Returns the translation and the definitions newly registered.
pub fn param_translate_inductive(
    env: &mut GlobalEnv,
    ind: &str,
    check: bool,
) -> DeriveResult<(Rc<InductiveDecl>, Vec<DerivedDef>)> {
    let mut forced = Vec::new();
    let decl = Translator {
        env,
        check,
        containers: true,
        forced: &mut forced,
    }
    .translate(ind)?;
    Ok((decl, forced))
}

/// Which constructor arguments of `src` carry a witness in its translation.
fn witness_masks(env: &GlobalEnv, src: &InductiveDecl) -> DeriveResult<Vec<Vec<bool>>> {
    let mut scratch = env.clone();
    let mut forced = Vec::new();
    let (_, masks) = Translator {
        env: &mut scratch,
        check: false,
        containers: true,
        forced: &mut forced,
    }
    .translate_decl(src)?;
    Ok(masks)
}

/// `Π params. Π indices. ind params indices -> Type`, closed.
pub fn build_motive(decl: &InductiveDecl) -> Term {
    let ni = decl.num_indices();
    let scrut_ty = mk_apps(
        Term::Ind(decl.name.clone()),
        (0..decl.num_params())
            .map(|l| Term::Rel(ni + decl.num_params() - 1 - l))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    let body = Term::prod(Name::named("t"), scrut_ty, Term::type0());
    compose_prod(decl.params.decls(), compose_prod(decl.indices.decls(), body))
}

/// The hypothesis for constructor `ctor`, scoped under the motive binder
/// `p`, and which arguments are followed by an induction hypothesis.
fn case_hypothesis(
    tr: &mut Translator<'_>,
    decl: &InductiveDecl,
    ctor: usize,
    nested: bool,
) -> DeriveResult<(Term, Vec<bool>)> {
    let np = decl.num_params();
    let pc = PredCtx {
        self_ind: decl.name.clone(),
        self_pred: SelfPred::Motive { level: 0 },
        var_preds: HashMap::new(),
    };
    let mut ctx = Context::from(vec![Decl::new(Name::named("p"), build_motive(decl))]);
    let mut tele = Vec::new();
    for (j, d) in decl.params.decls().iter().enumerate() {
        let d = Decl::new(d.name.clone(), lift(1, j, &d.ty));
        ctx.push(d.clone());
        tele.push(d);
    }
    let mut map: Vec<usize> = (1..=np).collect();
    let mut mask = Vec::new();
    let (ctele, concl) = decompose_prod(&decl.ctors[ctor].ty);
    for (i, arg) in ctele.decls().iter().enumerate() {
        let ty = reindex(&arg.ty, np + i, ctx.len(), &map);
        let pred = tr.pred_of(&pc, &ctx, &ty)?;
        let d = Decl::new(arg.name.clone(), ty);
        ctx.push(d.clone());
        tele.push(d);
        map.push(ctx.len() - 1);
        match pred {
            Some(p) if p.direct || nested => {
                let h = Decl::new(Name::Anonymous, Term::app(lift(1, 0, &p.term), Term::Rel(0)));
                ctx.push(h.clone());
                tele.push(h);
                mask.push(true);
            }
            _ => mask.push(false),
        }
    }
    let concl = reindex(&concl, np + ctele.len(), ctx.len(), &map);
    let (_, cargs) = decompose_app(&concl);
    let d = ctx.len();
    let value = mk_apps(
        Term::Construct(decl.name.clone(), ctor),
        map.iter().map(|l| Term::Rel(d - 1 - l)),
    );
    let result = mk_apps(
        Term::Rel(d - 1),
        map[..np]
            .iter()
            .map(|l| Term::Rel(d - 1 - l))
            .chain(cargs[np..].iter().cloned())
            .chain(std::iter::once(value)),
    );
    Ok((compose_prod(&tele, result), mask))
}

/// The case hypothesis for constructor `ctor` of `decl`, scoped under a
/// single binder for the motive. Registers container translations as needed.
pub fn build_case_hypothesis(
    env: &mut GlobalEnv,
    decl: &InductiveDecl,
    ctor: usize,
    nested: bool,
    check: bool,
) -> DeriveResult<(Term, Vec<DerivedDef>)> {
    let mut forced = Vec::new();
    let mut tr = Translator {
        env,
        check,
        containers: nested,
        forced: &mut forced,
    };
    let (ty, _) = case_hypothesis(&mut tr, decl, ctor, nested)?;
    Ok((ty, forced))
}

/// An enclosing inner fixpoint available for recursive witnesses.
struct Frame {
    name: Ident,
    prefix: Vec<Term>,
    depth: usize,
    /// Level of the fixpoint variable; `None` while trying a plain match.
    fix_level: Option<usize>,
}

struct NeedsRecursion;

enum WitnessError {
    Derive(DeriveError),
    Recursion(NeedsRecursion),
}

impl From<DeriveError> for WitnessError {
    fn from(e: DeriveError) -> WitnessError {
        WitnessError::Derive(e)
    }
}

struct WitnessBuilder<'a> {
    env: &'a GlobalEnv,
    /// Level of the motive `p` and of the outer fixpoint `F`.
    motive_level: usize,
    outer_fix_level: usize,
}

impl WitnessBuilder<'_> {
    /// A term of type `w` (at context depth `depth`), where `w` is either
    /// `p params indices a` or a translated container predicate applied to `a`.
    fn witness(&self, w: &Term, depth: usize, stack: &mut Vec<Frame>) -> Result<Term, WitnessError> {
        let (head, args) = decompose_app(w);
        let Some((a, _)) = args.split_last() else {
            return Err(DeriveError::Unsupported("unexpected witness type".into()).into());
        };
        match &head {
            Term::Rel(i) if depth - 1 - i == self.motive_level => {
                Ok(mk_apps(Term::Rel(depth - 1 - self.outer_fix_level), args))
            }
            Term::Ind(name) => {
                let tdecl = self
                    .env
                    .inductive(name)
                    .ok_or_else(|| DeriveError::UnknownInductive(name.to_string()))?;
                let tnp = tdecl.num_params();
                let prefix = &args[..tnp];
                let idx = &args[tnp..args.len() - 1];
                let found = stack.iter().find(|f| {
                    f.name == *name
                        && f.prefix
                            .iter()
                            .zip(prefix)
                            .all(|(p, q)| alpha_eq(&lift(depth - f.depth, 0, p), q))
                });
                if let Some(frame) = found {
                    return match frame.fix_level {
                        Some(level) => Ok(mk_apps(
                            Term::Rel(depth - 1 - level),
                            idx.iter().cloned().chain(std::iter::once(a.clone())),
                        )),
                        None => Err(WitnessError::Recursion(NeedsRecursion)),
                    };
                }
                self.container_witness(name, prefix, idx, a, depth, stack)
            }
            _ => Err(DeriveError::Unsupported("unexpected witness type".into()).into()),
        }
    }

    /// Witness for a container value: a plain match when no inner recursion
    /// is needed, an inner fixpoint otherwise.
    fn container_witness(
        &self,
        tname: &Ident,
        prefix: &[Term],
        idx: &[Term],
        a: &Term,
        depth: usize,
        stack: &mut Vec<Frame>,
    ) -> Result<Term, WitnessError> {
        stack.push(Frame {
            name: tname.clone(),
            prefix: prefix.to_vec(),
            depth,
            fix_level: None,
        });
        let plain = self.cases(tname, prefix, a.clone(), depth, stack);
        stack.pop();
        match plain {
            Ok(t) => return Ok(t),
            Err(WitnessError::Recursion(_)) => {}
            Err(e) => return Err(e),
        }

        let tdecl = self.env.inductive(tname).cloned().expect("translation registered");
        let src_name = tname.strip_prefix("is_").unwrap_or(tname);
        let src = self.env.inductive(src_name).cloned().expect("translation source registered");
        let snp = src.num_params();
        let sni = src.num_indices();
        let ts = &prefix[..snp];
        // fix G (is : indices) (c : X ts is) {struct c} : is_X prefix is c
        let mut tele: Vec<Decl> = Vec::new();
        for (j, d) in src.indices.decls().iter().enumerate() {
            tele.push(Decl::new(d.name.clone(), instantiate_under(&d.ty, j, ts)));
        }
        let cty = mk_apps(
            Term::Ind(src.name.clone()),
            ts.iter()
                .map(|t| lift(sni, 0, t))
                .chain((0..sni).map(|j| Term::Rel(sni - 1 - j))),
        );
        tele.push(Decl::new(Name::named(&suggest_name(&cty, &[])), cty));
        let goal = mk_apps(
            Term::Ind(tdecl.name.clone()),
            prefix
                .iter()
                .map(|t| lift(sni + 1, 0, t))
                .chain((0..=sni).map(|j| Term::Rel(sni - j))),
        );
        let fix_ty = compose_prod(&tele, goal);
        let inner_depth = depth + 1 + sni + 1;
        let lifted_prefix: Vec<Term> = prefix.iter().map(|t| lift(1 + sni + 1, 0, t)).collect();
        stack.push(Frame {
            name: tname.clone(),
            prefix: prefix.to_vec(),
            depth,
            fix_level: Some(depth),
        });
        let case = self.cases(tname, &lifted_prefix, Term::Rel(0), inner_depth, stack);
        stack.pop();
        let case = case?;
        let body_tele: Vec<Decl> = tele
            .iter()
            .enumerate()
            .map(|(i, d)| Decl::new(d.name.clone(), lift(1, i, &d.ty)))
            .collect();
        let fix = Term::fix(Name::named("G"), sni, fix_ty, compose_lam(&body_tele, case));
        Ok(mk_apps(fix, idx.iter().cloned().chain(std::iter::once(a.clone()))))
    }

    /// `match scrut with | d args => is_d prefix args witnesses end` over
    /// the source of translation `tname`, at context depth `depth`.
    fn cases(
        &self,
        tname: &Ident,
        prefix: &[Term],
        scrut: Term,
        depth: usize,
        stack: &mut Vec<Frame>,
    ) -> Result<Term, WitnessError> {
        let tdecl = self.env.inductive(tname).cloned().expect("translation registered");
        let src_name = tname.strip_prefix("is_").unwrap_or(tname);
        let src = self
            .env
            .inductive(src_name)
            .cloned()
            .ok_or_else(|| DeriveError::UnknownInductive(src_name.to_string()))?;
        let masks = witness_masks(self.env, &src)?;
        let snp = src.num_params();
        let sni = src.num_indices();
        let ts = &prefix[..snp];

        let mut mtele = Vec::new();
        for (j, d) in src.indices.decls().iter().enumerate() {
            mtele.push(Decl::new(d.name.clone(), instantiate_under(&d.ty, j, ts)));
        }
        let yty = mk_apps(
            Term::Ind(src.name.clone()),
            ts.iter()
                .map(|t| lift(sni, 0, t))
                .chain((0..sni).map(|j| Term::Rel(sni - 1 - j))),
        );
        mtele.push(Decl::new(Name::named("y"), yty));
        let mbody = mk_apps(
            Term::Ind(tdecl.name.clone()),
            prefix
                .iter()
                .map(|t| lift(sni + 1, 0, t))
                .chain((0..=sni).map(|j| Term::Rel(sni - j))),
        );
        let motive = compose_lam(&mtele, mbody);

        let mut branches = Vec::new();
        for (j, ctor) in src.ctors.iter().enumerate() {
            let (atele, _) = decompose_prod(&instantiate(&ctor.ty, ts));
            let m = atele.len();
            let db = depth + m;
            let mut ty = instantiate(&tdecl.ctors[j].ty, &prefix.iter().map(|t| lift(m, 0, t)).collect::<Vec<_>>());
            let mut vals = Vec::new();
            for r in 0..m {
                let v = Term::Rel(m - 1 - r);
                ty = peel(&ty, &v)?;
                vals.push(v);
                if masks[j][r] {
                    let Term::Prod(_, wty, _) = &ty else {
                        return Err(DeriveError::Unsupported("malformed translated constructor".into()).into());
                    };
                    let wty = (**wty).clone();
                    let w = self.witness(&wty, db, stack)?;
                    ty = peel(&ty, &w)?;
                    vals.push(w);
                }
            }
            let body = mk_apps(
                Term::Construct(tdecl.name.clone(), j),
                prefix.iter().map(|t| lift(m, 0, t)).chain(vals),
            );
            branches.push(compose_lam(atele.decls(), body));
        }
        Ok(Term::case(&src.name, motive, scrut, branches))
    }
}

fn peel(ty: &Term, v: &Term) -> DeriveResult<Term> {
    match ty {
        Term::Prod(_, _, cod) => Ok(subst(cod, 0, v)),
        _ => Err(DeriveError::Unsupported("constructor type has too few binders".into())),
    }
}

pub fn derive_induction(env: &mut GlobalEnv, req: &SchemeRequest, check: bool) -> DeriveResult<SchemeOutput> {
    if env.contains(&req.name) || env.constructor(&req.name).is_some() {
        return Err(DeriveError::NameClash(req.name.to_string()));
    }
    let decl = env
        .inductive(&req.ind)
        .cloned()
        .ok_or_else(|| DeriveError::UnknownInductive(req.ind.to_string()))?;
    let np = decl.num_params();
    let ni = decl.num_indices();
    let k = decl.ctors.len();

    let mut forced = Vec::new();
    let mut hyps = Vec::new();
    {
        let mut tr = Translator {
            env,
            check,
            containers: req.nested,
            forced: &mut forced,
        };
        for i in 0..k {
            hyps.push(case_hypothesis(&mut tr, &decl, i, req.nested)?);
        }
    }

    let motive = build_motive(&decl);
    // Levels: p = 0, H_i = 1 + i, F = 1 + k, then the fixpoint arguments.
    let base = 1 + k;
    let mut ftele = Vec::new();
    for (j, d) in decl.params.decls().iter().enumerate() {
        ftele.push(Decl::new(d.name.clone(), lift(base, j, &d.ty)));
    }
    for (j, d) in decl.indices.decls().iter().enumerate() {
        ftele.push(Decl::new(d.name.clone(), lift(base, np + j, &d.ty)));
    }
    let tty = mk_apps(
        Term::Ind(decl.name.clone()),
        (0..np)
            .map(|l| Term::Rel(np + ni - 1 - l))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    ftele.push(Decl::new(Name::named("t"), tty));
    let d_res = base + np + ni + 1;
    let fresult = mk_apps(
        Term::Rel(d_res - 1),
        (0..np + ni + 1).map(|l| Term::Rel(np + ni - l)),
    );
    let fix_ty = compose_prod(&ftele, fresult);

    let mut ty_tele = vec![Decl::new(Name::named("p"), motive.clone())];
    for (i, (h, _)) in hyps.iter().enumerate() {
        let hname = format!("H_{}", decl.ctors[i].name);
        ty_tele.push(Decl::new(Name::named(&hname), lift(i, 0, h)));
    }
    let scheme_ty = compose_prod(&ty_tele, fix_ty.clone());

    // Fixpoint body: fun params indices t => match t with ... end.
    let d_case = base + 1 + np + ni + 1;
    let fix_level = base;
    let param_level = |l: usize| base + 1 + l;
    let param_terms: Vec<Term> = (0..np).map(|l| Term::Rel(d_case - 1 - param_level(l))).collect();

    let mut mtele = Vec::new();
    for (j, d) in decl.indices.decls().iter().enumerate() {
        mtele.push(Decl::new(d.name.clone(), instantiate_under(&d.ty, j, &param_terms)));
    }
    let yty = mk_apps(
        Term::Ind(decl.name.clone()),
        param_terms
            .iter()
            .map(|t| lift(ni, 0, t))
            .chain((0..ni).map(|j| Term::Rel(ni - 1 - j))),
    );
    mtele.push(Decl::new(Name::named("t"), yty));
    let mbody = mk_apps(
        Term::Rel(d_case + ni),
        param_terms
            .iter()
            .map(|t| lift(ni + 1, 0, t))
            .chain((0..=ni).map(|j| Term::Rel(ni - j))),
    );
    let case_motive = compose_lam(&mtele, mbody);

    let builder = WitnessBuilder {
        env,
        motive_level: 0,
        outer_fix_level: fix_level,
    };
    let mut branches = Vec::new();
    for (i, ctor) in decl.ctors.iter().enumerate() {
        let (atele, _) = decompose_prod(&instantiate(&ctor.ty, &param_terms));
        let m = atele.len();
        let db = d_case + m;
        let (hyp, mask) = &hyps[i];
        let mut ty = lift(db - 1, 0, hyp);
        let mut vals = Vec::new();
        for l in 0..np {
            let v = Term::Rel(db - 1 - param_level(l));
            ty = peel(&ty, &v)?;
            vals.push(v);
        }
        for r in 0..m {
            let v = Term::Rel(m - 1 - r);
            ty = peel(&ty, &v)?;
            vals.push(v);
            if mask[r] {
                let Term::Prod(_, wty, _) = &ty else {
                    return Err(DeriveError::Unsupported("malformed case hypothesis".into()));
                };
                let wty = (**wty).clone();
                let w = match builder.witness(&wty, db, &mut Vec::new()) {
                    Ok(w) => w,
                    Err(WitnessError::Derive(e)) => return Err(e),
                    Err(WitnessError::Recursion(_)) => {
                        return Err(DeriveError::Unsupported("unguarded nested witness".into()))
                    }
                };
                ty = peel(&ty, &w)?;
                vals.push(w);
            }
        }
        let body = mk_apps(Term::Rel(db - 1 - (1 + i)), vals);
        branches.push(compose_lam(atele.decls(), body));
    }
    let case = Term::case(&decl.name, case_motive, Term::Rel(0), branches);
    let (fdecls, _) = decompose_prod_n(&fix_ty, np + ni + 1).expect("fixpoint type has its binders");
    let body_tele: Vec<Decl> = fdecls
        .decls()
        .iter()
        .enumerate()
        .map(|(i, d)| Decl::new(d.name.clone(), lift(1, i, &d.ty)))
        .collect();
    let fix = Term::fix(Name::named("F"), np + ni, fix_ty, compose_lam(&body_tele, case));
    let body = compose_lam(&ty_tele, fix);

    let def = Definition {
        name: req.name.clone(),
        ty: scheme_ty,
        body,
    };
    let scheme = finish_definition(env, def, check, Vec::new())?;
    Ok(SchemeOutput { forced, scheme })
}
