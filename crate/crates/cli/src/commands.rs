use std::path::Path;

use serde_json::json;
use tiling_cohomology::approximant::{
    build_approximant, check_substitution_route, forgetful_map_between, substitution_map_on,
    ApproximantComplex,
};
use tiling_cohomology::complex::{complex_to_json, parse_complex, CellComplex, MapDocument};
use tiling_cohomology::homalg::cohomology::describe_group;
use tiling_cohomology::homalg::{
    cohomology, direct_limit_endomorphism, direct_limit_sequence, direct_limit_sequence_rational,
    group_equal, induced_map, AbelianGroup, Coefficients, CohomologyResult, Equality, GroupHom,
    LimitGroup,
};
use tiling_cohomology::repvariety::{
    abelian_crosscheck, induced_repvar_map, rep_variety, repvar_limit, FiniteGroup, VarietyLimit,
};
use tiling_cohomology::substitution::{seed, Expansion, Image};
use tiling_cohomology::{
    bundled, expand_patch, parse_rule, validate_rule, Error, Result, SubstitutionRule,
};

use crate::render::patch_svg;
use crate::report::Report;
use crate::{DumpMap, Route};

/// Representatives printed in text reports; JSON always lists all of them.
const SHOWN_REPRESENTATIVES: usize = 24;

fn not_found(what: &str, arg: &str) -> Error {
    Error::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("no {what} file or bundled {what} named {arg:?}"),
    ))
}

fn load_rule(arg: &str) -> Result<(SubstitutionRule, String)> {
    let path = Path::new(arg);
    if path.is_file() {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_string());
        return Ok((parse_rule(&std::fs::read_to_string(path)?)?, name));
    }
    let text = bundled::rule_text(arg).ok_or_else(|| not_found("rule", arg))?;
    Ok((parse_rule(text)?, arg.to_string()))
}

fn load_complex(arg: &str) -> Result<CellComplex> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_complex(&std::fs::read_to_string(path)?);
    }
    parse_complex(bundled::complex_text(arg).ok_or_else(|| not_found("complex", arg))?)
}

fn load_group(spec: &str) -> Result<FiniteGroup> {
    if let Some((family, _)) = spec.split_once(':') {
        if ["cyclic", "dihedral", "sym"].contains(&family) {
            return FiniteGroup::builtin(spec);
        }
    }
    let path = Path::new(spec);
    if path.is_file() {
        return FiniteGroup::from_cayley_json(&std::fs::read_to_string(path)?);
    }
    Err(Error::InvalidGroup(format!(
        "{spec:?} is neither cyclic:k, dihedral:n, sym:n nor a Cayley table file"
    )))
}

fn image_text(rule: &SubstitutionRule, t: usize) -> String {
    match rule.image(t as u16) {
        Image::Word(w) => rule.format_word(w),
        Image::Block(cells) => {
            let b = rule.expansion().unwrap_or(1);
            (0..b)
                .rev()
                .map(|y| rule.format_word(&cells[y * b..(y + 1) * b]))
                .collect::<Vec<_>>()
                .join(" / ")
        }
    }
}

fn aperiodic_text(rule: &SubstitutionRule) -> &'static str {
    match rule.declared_aperiodic() {
        Some(true) => "declared aperiodic",
        Some(false) => "declared periodic",
        None => "aperiodicity not declared",
    }
}

fn rule_line(rule: &SubstitutionRule, name: &str) -> String {
    format!(
        "rule: {name} (dimension {}, tiles {}, {})",
        rule.dimension(),
        rule.alphabet().join(" "),
        aperiodic_text(rule)
    )
}

pub fn info(echo: &[String], arg: &str, json: bool) -> Result<String> {
    let (rule, name) = load_rule(arg)?;
    let v = validate_rule(&rule);
    let mut r = Report::new(echo);
    r.line(format!("rule: {name}"));
    r.line(format!("dimension: {}", rule.dimension()));
    r.line(format!("tiles: {}", rule.alphabet().join(" ")));
    for (t, tile) in rule.alphabet().iter().enumerate() {
        r.line(format!("  {tile} -> {}", image_text(&rule, t)));
    }
    r.line(match &v.expansion {
        Expansion::Lengths(l) => format!(
            "image lengths: {}",
            l.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
        Expansion::Block(b) => format!("expansion: {b}"),
    });
    r.line(match v.primitivity_exponent {
        Some(k) => format!("primitive: yes (exponent {k})"),
        None => "primitive: no".to_string(),
    });
    r.line(format!("abelianization: {:?}", v.abelianization));
    r.line(format!("aperiodicity: {}", aperiodic_text(&rule)));
    for w in &v.warnings {
        r.line(format!("warning: {w}"));
    }
    r.set("rule", &name);
    r.set("dimension", rule.dimension());
    r.set("tiles", rule.alphabet());
    r.set(
        "images",
        (0..rule.tile_count())
            .map(|t| image_text(&rule, t))
            .collect::<Vec<_>>(),
    );
    r.set("validation", &v);
    Ok(r.render(json))
}

pub struct CohomologyArgs {
    pub rule: String,
    pub collar: usize,
    pub coeff: Coefficients,
    pub route: Route,
    pub max_collar: usize,
    pub window: usize,
}

fn limit_display(coeff: Coefficients, lim: &LimitGroup) -> String {
    match (coeff, lim.rational_rank()) {
        (Coefficients::Rational, Some(r)) => describe_group(coeff, &AbelianGroup::free(r)),
        _ => lim.to_string(),
    }
}

fn limits_equal(coeff: Coefficients, a: &LimitGroup, b: &LimitGroup) -> Equality {
    if coeff != Coefficients::Rational {
        return group_equal(a, b);
    }
    match (a.rational_rank(), b.rational_rank()) {
        (Some(x), Some(y)) if x == y => Equality::Equal,
        (Some(_), Some(_)) => Equality::Distinct,
        _ => Equality::Indeterminate,
    }
}

fn level_lines(r: &mut Report, ac: &ApproximantComplex, coh: &CohomologyResult) {
    r.line(ac.to_string());
    if let Some(c) = ac.caveat() {
        r.line(format!("  caveat: {c}"));
    }
    for k in 0..=ac.dimension() {
        r.line(format!("  H^{k} = {}", coh.describe(k)));
    }
}

fn level_json(ac: &ApproximantComplex, coh: &CohomologyResult) -> serde_json::Value {
    json!({
        "level": ac.level(),
        "counts": ac.counts(),
        "caveat": ac.caveat(),
        "cohomology": (0..=ac.dimension())
            .map(|k| json!({ "degree": k, "group": coh.group(k), "display": coh.describe(k) }))
            .collect::<Vec<_>>(),
    })
}

fn limit_lines(
    r: &mut Report,
    coeff: Coefficients,
    limits: &[LimitGroup],
) -> Vec<serde_json::Value> {
    let mut out = Vec::new();
    for (k, lim) in limits.iter().enumerate() {
        let shown = limit_display(coeff, lim);
        match lim {
            LimitGroup::Stabilized { caveat, .. } => {
                r.line(format!("  H^{k} = {shown}  [{caveat}]"))
            }
            LimitGroup::EndoLimit(e) => r.line(format!(
                "  H^{k} = {shown}  [endomorphism on rank {} lattice: {}]",
                e.rank, e.matrix
            )),
            LimitGroup::Undetermined { reason, .. } => {
                r.line(format!("  H^{k} = {shown}  [{reason}]"))
            }
        }
        out.push(json!({ "degree": k, "limit": lim, "display": shown }));
    }
    out
}

fn gahler_route(
    r: &mut Report,
    rule: &SubstitutionRule,
    a: &CohomologyArgs,
) -> Result<Vec<LimitGroup>> {
    if a.max_collar < a.collar {
        return Err(Error::Parse {
            key: "--max-collar".into(),
            message: format!("must be at least --collar ({})", a.collar),
        });
    }
    if a.window == 0 {
        return Err(Error::Parse {
            key: "--window".into(),
            message: "must be at least 1".into(),
        });
    }
    r.line(format!(
        "route: gahler, levels {}..{}, window {}",
        a.collar, a.max_collar, a.window
    ));
    let mut acs = Vec::new();
    let mut cohs = Vec::new();
    let mut levels_json = Vec::new();
    for n in a.collar..=a.max_collar {
        let ac = r.timed(&format!("gahler build level {n}"), || {
            build_approximant(rule, n)
        })?;
        let coh = r.timed(&format!("gahler cohomology level {n}"), || {
            cohomology(&ac.complex().cochain_complex()?, a.coeff)
        })?;
        level_lines(r, &ac, &coh);
        levels_json.push(level_json(&ac, &coh));
        acs.push(ac);
        cohs.push(coh);
    }
    let d = rule.dimension();
    let mut maps: Vec<Vec<GroupHom>> = vec![Vec::new(); d + 1];
    let mut maps_json = Vec::new();
    for i in 0..acs.len().saturating_sub(1) {
        let f = forgetful_map_between(&acs[i + 1], &acs[i])?;
        let (from, to) = (acs[i].level(), acs[i + 1].level());
        r.line(format!(
            "forgetful map Γ_{to} -> Γ_{from}, induced on cohomology:"
        ));
        for (k, per_degree) in maps.iter_mut().enumerate() {
            let h = induced_map(&f.chain[k], &cohs[i + 1], &cohs[i], k)?;
            let iso = if a.coeff == Coefficients::Rational {
                h.free_block().is_invertible_over_q()
            } else {
                h.is_isomorphism()
            };
            r.line(format!(
                "  H^{k}: {} ({})",
                h.matrix(),
                if iso {
                    "isomorphism"
                } else {
                    "not an isomorphism"
                }
            ));
            maps_json.push(json!({
                "from_level": from, "to_level": to, "degree": k,
                "matrix": h.matrix().to_string(), "isomorphism": iso,
            }));
            per_degree.push(h);
        }
    }
    let mut limits = Vec::new();
    for (k, per_degree) in maps.iter().enumerate() {
        let groups: Vec<AbelianGroup> = cohs.iter().map(|c| c.group(k).clone()).collect();
        let lim = if a.coeff == Coefficients::Rational {
            direct_limit_sequence_rational(&groups, per_degree, a.window)?
        } else {
            direct_limit_sequence(&groups, per_degree, a.window)?
        };
        limits.push(lim.with_first_level(a.collar));
    }
    r.line("limit (gahler):");
    let lj = limit_lines(r, a.coeff, &limits);
    r.set(
        "gahler",
        json!({ "levels": levels_json, "maps": maps_json, "limits": lj }),
    );
    Ok(limits)
}

fn substitution_route(
    r: &mut Report,
    rule: &SubstitutionRule,
    a: &CohomologyArgs,
) -> Result<Vec<LimitGroup>> {
    check_substitution_route(rule, a.collar)?;
    r.line(format!("route: substitution, level {}", a.collar));
    let n = a.collar;
    let ac = r.timed(&format!("substitution build level {n}"), || {
        build_approximant(rule, n)
    })?;
    let coh = r.timed(&format!("substitution cohomology level {n}"), || {
        cohomology(&ac.complex().cochain_complex()?, a.coeff)
    })?;
    level_lines(r, &ac, &coh);
    let s = r.timed("substitution map", || substitution_map_on(&ac))?;
    r.line(format!(
        "substitution map Γ_{n} -> Γ_{n}, induced on cohomology:"
    ));
    let mut limits = Vec::new();
    let mut maps_json = Vec::new();
    for k in 0..=rule.dimension() {
        let h = induced_map(&s.chain[k], &coh, &coh, k)?;
        r.line(format!("  H^{k}: {}", h.matrix()));
        maps_json.push(json!({ "degree": k, "matrix": h.matrix().to_string() }));
        limits.push(direct_limit_endomorphism(coh.group(k), &h)?);
    }
    r.line("limit (substitution):");
    let lj = limit_lines(r, a.coeff, &limits);
    r.set(
        "substitution",
        json!({ "level": level_json(&ac, &coh), "maps": maps_json, "limits": lj }),
    );
    Ok(limits)
}

pub fn cohomology_cmd(echo: &[String], a: &CohomologyArgs, json: bool) -> Result<String> {
    let (rule, name) = load_rule(&a.rule)?;
    if a.route != Route::Gahler {
        // refuse before doing any work
        check_substitution_route(&rule, a.collar)?;
    }
    let mut r = Report::new(echo);
    r.line(rule_line(&rule, &name));
    r.line(format!("coefficients: {}", a.coeff));
    r.set("rule", &name);
    r.set("coefficients", a.coeff);
    match a.route {
        Route::Gahler => {
            gahler_route(&mut r, &rule, a)?;
        }
        Route::Substitution => {
            substitution_route(&mut r, &rule, a)?;
        }
        Route::Both => {
            let g = gahler_route(&mut r, &rule, a)?;
            let s = substitution_route(&mut r, &rule, a)?;
            r.line("comparison of the two limits:");
            let mut cmp = Vec::new();
            for (k, (x, y)) in g.iter().zip(&s).enumerate() {
                let e = limits_equal(a.coeff, x, y);
                r.line(format!("  H^{k}: {e}"));
                cmp.push(json!({ "degree": k, "equality": e }));
            }
            r.set("comparison", cmp);
        }
    }
    Ok(r.render(json))
}

pub struct RepvarArgs {
    pub rule: String,
    pub group: String,
    pub collar: usize,
    pub max_collar: usize,
    pub window: usize,
    pub limit: bool,
}

pub fn repvar(echo: &[String], a: &RepvarArgs, json: bool) -> Result<String> {
    let (rule, name) = load_rule(&a.rule)?;
    let g = load_group(&a.group)?;
    if a.max_collar < a.collar {
        return Err(Error::Parse {
            key: "--max-collar".into(),
            message: format!("must be at least --collar ({})", a.collar),
        });
    }
    let mut r = Report::new(echo);
    r.line(rule_line(&rule, &name));
    r.line(format!(
        "group: {} (order {}, {})",
        a.group,
        g.order(),
        if g.is_abelian() {
            "abelian"
        } else {
            "non-abelian"
        }
    ));
    r.set("rule", &name);
    r.set(
        "group",
        json!({ "spec": a.group, "order": g.order(), "elements": g.names() }),
    );
    let mut acs = Vec::new();
    let mut vars = Vec::new();
    let mut levels_json = Vec::new();
    for n in a.collar..=a.max_collar {
        let ac = r.timed(&format!("build level {n}"), || build_approximant(&rule, n))?;
        let (p, v) = r.timed(&format!("enumerate level {n}"), || {
            rep_variety(ac.complex(), &g)
        })?;
        r.line(ac.to_string());
        if let Some(c) = ac.caveat() {
            r.line(format!("  caveat: {c}"));
        }
        let gen_names: Vec<&str> = p.generators.iter().map(|&e| ac.label(1, e)).collect();
        r.line(format!(
            "  π₁: {} generators, {} relators",
            p.generator_count(),
            p.relators.len()
        ));
        r.line(format!("  generators: {}", gen_names.join(" ")));
        r.line(format!(
            "  Hom: {} homomorphisms, {} conjugation orbits",
            v.hom_count(),
            v.orbit_count()
        ));
        let reps: Vec<Vec<&str>> = v
            .representatives
            .iter()
            .map(|rho| rho.iter().map(|&x| g.name(x)).collect())
            .collect();
        for (rep, size) in reps.iter().zip(&v.orbit_sizes).take(SHOWN_REPRESENTATIVES) {
            r.line(format!("    [{}] orbit size {size}", rep.join(", ")));
        }
        if reps.len() > SHOWN_REPRESENTATIVES {
            r.line(format!(
                "    ... {} more orbits",
                reps.len() - SHOWN_REPRESENTATIVES
            ));
        }
        let mut level = json!({
            "level": n,
            "counts": ac.counts(),
            "generators": gen_names,
            "relators": p.relators.len(),
            "hom_count": v.hom_count(),
            "orbit_count": v.orbit_count(),
            "orbit_sizes": v.orbit_sizes,
            "representatives": reps,
        });
        if g.is_abelian() {
            let c = abelian_crosscheck(ac.complex(), &g)?;
            r.line(format!(
                "  abelian cross-check: {} homomorphisms, product of |H^1(Γ_{n}; Z/m)| = {}: {}",
                c.hom_count,
                c.cohomology_count,
                if c.agrees { "pass" } else { "FAIL" }
            ));
            level["crosscheck"] = serde_json::to_value(&c).unwrap();
        }
        levels_json.push(level);
        acs.push(ac);
        vars.push((p, v));
    }
    let mut maps = Vec::new();
    let mut maps_json = Vec::new();
    for i in 0..acs.len().saturating_sub(1) {
        let f = forgetful_map_between(&acs[i + 1], &acs[i])?;
        let m = induced_repvar_map(
            &f,
            acs[i + 1].complex(),
            &vars[i + 1].0,
            &vars[i + 1].1,
            &vars[i].0,
            &vars[i].1,
            &g,
        )?;
        r.line(format!(
            "variety map level {} -> {}: orbit images {:?} ({})",
            acs[i].level(),
            acs[i + 1].level(),
            m.images,
            if m.is_bijection() {
                "bijection"
            } else {
                "not a bijection"
            }
        ));
        maps_json.push(json!({
            "from_level": acs[i].level(), "to_level": acs[i + 1].level(),
            "images": m.images, "bijection": m.is_bijection(),
        }));
        maps.push(m);
    }
    r.set("levels", levels_json);
    r.set("maps", maps_json);
    if a.limit {
        let varieties: Vec<_> = vars.iter().map(|(_, v)| v.clone()).collect();
        let lim = repvar_limit(&varieties, &maps, a.collar, a.window);
        match &lim {
            VarietyLimit::Stabilized {
                level,
                window,
                orbits,
                homs,
                caveat,
            } => r.line(format!(
                "limit: {orbits} orbits ({homs} homomorphisms), stabilized from level {level} over window {window}  [{caveat}]"
            )),
            VarietyLimit::Undetermined {
                orbit_trajectory,
                reason,
            } => r.line(format!(
                "limit: undetermined, orbit counts {orbit_trajectory:?}  [{reason}]"
            )),
        }
        r.set("limit", &lim);
    }
    Ok(r.render(json))
}

pub fn render(
    arg: &str,
    iterations: usize,
    seed_tile: Option<&str>,
    out: Option<&Path>,
) -> Result<String> {
    let (rule, _) = load_rule(arg)?;
    let t = match seed_tile {
        None => 0,
        Some(name) => rule.tile_id(name).ok_or_else(|| Error::Parse {
            key: "--seed".into(),
            message: format!("unknown tile {name:?}"),
        })?,
    };
    let patch = expand_patch(&rule, &seed(&rule, t), iterations)?;
    let svg = patch_svg(&rule, &patch);
    match out {
        Some(path) => {
            std::fs::write(path, svg)?;
            Ok(String::new())
        }
        None => Ok(svg),
    }
}

pub fn cw(echo: &[String], arg: &str, coeff: Coefficients, json: bool) -> Result<String> {
    let x = load_complex(arg)?;
    let coh = cohomology(&x.cochain_complex()?, coeff)?;
    let mut r = Report::new(echo);
    let counts = x.counts();
    r.line(format!(
        "complex: dimension {}, cells {}",
        x.dimension,
        counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    ));
    r.line(format!(
        "euler characteristic: {}",
        x.euler_characteristic()
    ));
    r.line(format!("coefficients: {coeff}"));
    let mut groups = Vec::new();
    for k in 0..=x.dimension {
        r.line(format!("H^{k} = {}", coh.describe(k)));
        groups.push(json!({ "degree": k, "group": coh.group(k), "display": coh.describe(k) }));
    }
    r.set("counts", counts);
    r.set("euler_characteristic", x.euler_characteristic());
    r.set("coefficients", coeff);
    r.set("cohomology", groups);
    Ok(r.render(json))
}

pub fn dump(arg: &str, collar: usize, map: Option<DumpMap>) -> Result<String> {
    let (rule, _) = load_rule(arg)?;
    let mut out = match map {
        None => complex_to_json(build_approximant(&rule, collar)?.complex(), Some(collar)),
        Some(DumpMap::Forgetful) => {
            if collar == 0 {
                return Err(Error::Precondition(
                    "the forgetful map out of level 0 does not exist".into(),
                ));
            }
            let f = forgetful_map_between(
                &build_approximant(&rule, collar)?,
                &build_approximant(&rule, collar - 1)?,
            )?;
            serde_json::to_string_pretty(&MapDocument::from(&f))?
        }
        Some(DumpMap::Substitution) => {
            check_substitution_route(&rule, collar)?;
            let s = substitution_map_on(&build_approximant(&rule, collar)?)?;
            serde_json::to_string_pretty(&MapDocument::from(&s))?
        }
    };
    out.push('\n');
    Ok(out)
}
