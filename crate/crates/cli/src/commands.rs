use serde_json::{json, Map, Value};
use steenrod_core::classify::{
    conjecture_generators, etale_ops_h1, etale_ops_hn, motivic_ops_deg1_descent, motivic_ops_deg1_zeta,
    motivic_ops_weight1, ConjectureOptions, DescriptorData, OperationDescriptor,
};
use steenrod_core::motivic::{convert, normalize_motivic, Direction, Setting};
use steenrod_core::steenrod::{admissible_sequences, degree_weight, excess, stuck_frobenius};
use steenrod_core::unstable::{
    cartan_generators, iterate_borel, monomial_basis, BorelBase, GeneratorDescriptor, PoincareTable, Window,
};
use steenrod_core::Bidegree;

use crate::args::{Command, DirectionArg, KindArg, ModeArg};
use crate::error::CliError;
use crate::{expr, model};

pub struct Row {
    pub label: String,
    pub source: Option<Bidegree>,
    pub target: Option<Bidegree>,
    pub data: Value,
}

pub struct Report {
    pub command: &'static str,
    pub params: Map<String, Value>,
    pub rows: Vec<Row>,
    /// Text-mode output; rows are printed when empty.
    pub text: Vec<String>,
    pub notes: Vec<String>,
}

fn pair(b: Option<Bidegree>) -> Value {
    b.map_or(Value::Null, |b| json!([b.deg, b.weight]))
}

impl Report {
    fn new(command: &'static str) -> Self {
        Self { command, params: Map::new(), rows: Vec::new(), text: Vec::new(), notes: Vec::new() }
    }

    fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.into(), v.into());
    }

    fn model_params(&mut self, model: &steenrod_core::CoefficientModel) {
        self.param("l", model.ctx().ell());
        self.param("d", model.ctx().d());
        self.param("model", model.name());
    }

    pub fn to_json(&self) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|r| json!({"label": r.label, "source": pair(r.source), "target": pair(r.target), "data": r.data}))
            .collect();
        let doc = json!({
            "version": "1",
            "command": self.command,
            "params": Value::Object(self.params.clone()),
            "results": results,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.text.is_empty() {
            for r in &self.rows {
                let line = match (r.source, r.target) {
                    (Some(s), Some(t)) => format!("{}: {s} -> {t}", r.label),
                    (None, Some(t)) => format!("{} {t}", r.label),
                    _ => r.label.clone(),
                };
                out.push_str(&line);
                out.push('\n');
            }
        } else {
            for l in &self.text {
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }
}

fn descriptor_row(op: &OperationDescriptor, excluded: bool) -> Row {
    let mut data = match &op.data {
        DescriptorData::Coefficient { c, c_bidegree, eps, m, b } => json!({
            "c": c,
            "c_bidegree": [c_bidegree.deg, c_bidegree.weight],
            "eps": eps,
            "m": m,
            "b": b,
        }),
        DescriptorData::Sequences { i_seq, j_seq, word } => json!({
            "I": i_seq,
            "J": j_seq,
            "word": word.to_string(),
        }),
    };
    data["kind"] = json!(op.kind.to_string());
    if excluded {
        data["excluded"] = json!(true);
    }
    Row { label: op.label.clone(), source: Some(op.source), target: Some(op.target), data }
}

fn generator_row(g: &GeneratorDescriptor, ctx: steenrod_core::PrimeContext, source: Bidegree) -> Row {
    Row {
        label: g.label.to_string(),
        source: Some(source),
        target: Some(g.bidegree),
        data: json!({
            "kind": "generator",
            "seq": g.seq.as_ref().map(|s| s.flat(ctx)),
            "exterior": g.is_exterior(ctx),
            "transgressive": g.transgressive,
        }),
    }
}

fn table_rows(t: &PoincareTable) -> Vec<Row> {
    t.entries
        .iter()
        .map(|(b, n)| Row {
            label: format!("dim {n}"),
            source: None,
            target: Some(*b),
            data: json!({"kind": "dim", "dim": n}),
        })
        .collect()
}

fn window_params(r: &mut Report, max_deg: i64, max_wt: Option<i64>) -> Window {
    r.param("max_deg", max_deg);
    r.param("max_wt", max_wt);
    Window::new(max_deg, max_wt)
}

pub fn execute(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Normalize { expr: text, mode, source, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let setting = match mode {
                ModeArg::Classical => Setting::Classical,
                ModeArg::Motivic => Setting::Motivic,
                ModeArg::Etale => Setting::Etale,
            };
            let mut r = Report::new("normalize");
            r.model_params(&model);
            r.param("expr", text.as_str());
            r.param("mode", format!("{mode:?}").to_lowercase());
            r.param("source", pair(source.map(|s| s.0)));
            let terms = expr::parse(text)?;
            let items = expr::to_items(&terms, &model, setting)?;
            let out = normalize_motivic(&items, source.map(|s| s.0), setting, &model)?;
            r.text.push(out.render(&model));
            for (t, c) in out.sorted_terms(&model) {
                if out.source.is_none() && stuck_frobenius(&t.word) {
                    r.notes.push(format!(
                        "note: P0 in {} precedes a final beta and cannot move right; give --source to evaluate it",
                        t.word
                    ));
                }
                r.rows.push(Row {
                    label: out.render_term(t, c, &model),
                    source: out.source,
                    target: out.term_bidegree(t, &model),
                    data: json!({
                        "coefficient": c.value(),
                        "scalar": model.render_mono(&t.coeff),
                        "word": t.word.to_string(),
                        "power": t.power,
                    }),
                });
            }
            Ok(r)
        }
        Command::Basis { max_deg, max_excess, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let ctx = model.ctx();
            let mut r = Report::new("basis");
            r.model_params(&model);
            r.param("max_deg", *max_deg);
            r.param("max_excess", *max_excess);
            for seq in admissible_sequences(ctx, *max_deg, *max_excess) {
                let word = seq.to_word(ctx);
                let dw = degree_weight(&seq, ctx);
                let e = excess(&seq, ctx);
                r.text.push(format!("{word}\tdeg {}\texcess {e}", dw.delta_deg));
                r.rows.push(Row {
                    label: word.to_string(),
                    source: None,
                    target: None,
                    data: json!({
                        "seq": seq.flat(ctx),
                        "degree": dw.delta_deg,
                        "excess": e,
                        "weight_multiplier": dw.multiplier,
                    }),
                });
            }
            Ok(r)
        }
        Command::Generators { space, max_deg, i, borel, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let ctx = model.ctx();
            let n = space.0;
            let mut r = Report::new("generators");
            r.model_params(&model);
            r.param("space", format!("K{n}"));
            r.param("max_deg", *max_deg);
            r.param("i", *i);
            r.param("borel", *borel);
            let gens = if *borel {
                if *i != 1 {
                    return Err(CliError::Usage("--borel builds weight-1 generators only".into()));
                }
                iterate_borel(BorelBase::K1, n, ctx, *max_deg)?.generators
            } else {
                cartan_generators(n, ctx, *max_deg, *i)?
            };
            let source = Bidegree::new(n, *i);
            for g in &gens {
                r.text.push(format!("{} {}", g.label, g.bidegree));
                r.rows.push(generator_row(g, ctx, source));
            }
            Ok(r)
        }
        Command::Poincare { space, max_deg, max_wt, i, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let ctx = model.ctx();
            let mut r = Report::new("poincare");
            r.model_params(&model);
            r.param("space", format!("K{}", space.0));
            r.param("i", *i);
            let w = window_params(&mut r, *max_deg, *max_wt);
            let gens = cartan_generators(space.0, ctx, *max_deg, *i)?;
            r.rows = table_rows(&monomial_basis(&gens, ctx, w)?);
            Ok(r)
        }
        Command::Classify { kind, n, i, max_deg, max_wt, strict_b, excess_threshold, show_excluded, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let ctx = model.ctx();
            let mut r = Report::new("classify");
            r.model_params(&model);
            r.param("kind", format!("{kind:?}"));
            r.param("n", *n);
            r.param("i", *i);
            let w = window_params(&mut r, *max_deg, *max_wt);
            match kind {
                KindArg::EtaleH1 => {
                    r.rows = etale_ops_h1(*i, &model, *max_deg)?.iter().map(|o| descriptor_row(o, false)).collect();
                }
                KindArg::Deg1Zeta => {
                    r.rows = motivic_ops_deg1_zeta(*i, &model, w)?.iter().map(|o| descriptor_row(o, false)).collect();
                }
                KindArg::Deg1Descent => {
                    let w = Window::new(*max_deg, Some(max_wt.unwrap_or(*max_deg)));
                    r.rows =
                        motivic_ops_deg1_descent(*i, &model, w)?.iter().map(|o| descriptor_row(o, false)).collect();
                }
                KindArg::EtaleHn | KindArg::MotivicW1 | KindArg::MotivicW0 => {
                    let (gens, table) = match kind {
                        KindArg::EtaleHn => etale_ops_hn(*n, *i, &model, *max_deg)?,
                        _ => motivic_ops_weight1(*n, &model, w, *kind == KindArg::MotivicW0)?,
                    };
                    let source = match kind {
                        KindArg::EtaleHn => Bidegree::new(*n, i.rem_euclid(i64::from(ctx.d()))),
                        KindArg::MotivicW0 => Bidegree::new(*n, 0),
                        _ => Bidegree::new(*n, 1),
                    };
                    r.rows = gens.iter().map(|g| generator_row(g, ctx, source)).collect();
                    r.rows.extend(table_rows(&table));
                }
                KindArg::Conjecture => {
                    r.param("strict_b", *strict_b);
                    r.param("excess_threshold", *excess_threshold);
                    let opts = ConjectureOptions { excess_threshold: *excess_threshold, strict_b: *strict_b };
                    let out = conjecture_generators(*n, *i, ctx, w, opts)?;
                    r.rows = out.generators.iter().map(|o| descriptor_row(o, false)).collect();
                    if *show_excluded {
                        r.rows.extend(out.excluded.iter().map(|o| descriptor_row(o, true)));
                    } else if !out.excluded.is_empty() {
                        r.notes.push(format!(
                            "note: {} candidates excluded by the weight filter (--show-excluded lists them)",
                            out.excluded.len()
                        ));
                    }
                }
            }
            Ok(r)
        }
        Command::Convert { source, a, direction, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let mut r = Report::new("convert");
            r.model_params(&model);
            r.param("source", pair(Some(source.0)));
            r.param("a", *a);
            let dir = match direction {
                DirectionArg::PToPv => Direction::PToPV,
                DirectionArg::PvToP => Direction::PVToP,
            };
            r.param("direction", format!("{direction:?}"));
            let c = convert(*a, source.0, dir, model.ctx())?;
            let zeta = match c.zeta_exponent {
                0 => String::new(),
                1 => "[zeta] ".into(),
                e => format!("[zeta]^{e} "),
            };
            let mut label = format!("{} = {zeta}{} on H^{}", c.from, c.to, source.0);
            if c.power_marker {
                label.push_str(&format!(" (= x^{})", model.ctx().ell()));
            }
            r.rows.push(Row {
                label,
                source: Some(source.0),
                target: Some(c.lhs),
                data: json!({
                    "from": c.from.to_string(),
                    "to": c.to.to_string(),
                    "zeta_exponent": c.zeta_exponent,
                    "power_marker": c.power_marker,
                }),
            });
            Ok(r)
        }
        Command::Descent { i, max_deg, max_wt, common } => {
            let model = model::load(common.model.as_deref(), common.ell, common.d)?;
            let mut r = Report::new("descent");
            r.model_params(&model);
            r.param("i", *i);
            let w = window_params(&mut r, *max_deg, Some(max_wt.unwrap_or(*max_deg)));
            r.rows = motivic_ops_deg1_descent(*i, &model, w)?.iter().map(|o| descriptor_row(o, false)).collect();
            Ok(r)
        }
        Command::Check => Err(CliError::Usage("check is dispatched by run".into())),
    }
}

pub fn wants_json(cmd: &Command) -> bool {
    match cmd {
        Command::Normalize { common, .. }
        | Command::Basis { common, .. }
        | Command::Generators { common, .. }
        | Command::Poincare { common, .. }
        | Command::Classify { common, .. }
        | Command::Convert { common, .. }
        | Command::Descent { common, .. } => common.json,
        Command::Check => false,
    }
}
