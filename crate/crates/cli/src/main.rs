use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use zhukit::dualrep::{self, DualSpace};
use zhukit::fusion::{self, FinAlgebra, FinBimodule, FinModule};
use zhukit::induce::{self, ZhuModule};
use zhukit::linalg::{unit, Matrix, Vector};
use zhukit::rat::{fmt_rat, parse_rat};
use zhukit::voa::{make_heisenberg, make_virasoro, ModulePresentation, VoaPresentation};
use zhukit::zhu::{omega_subspace, Bimodule, ZhuAlgebra};
use zhukit::{verify, Error, Rat};

#[derive(Parser)]
#[command(
    name = "zhukit",
    version,
    about = "Exact computations with Zhu algebras, their bimodules, induced modules and fusion dimensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zhu algebra A(V) at the cutoff, with its structure checks
    Zhu {
        #[command(flatten)]
        voa: VoaArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bimodule A(W,z) of the adjoint module or of F(U) and its axioms
    Bimodule {
        #[command(flatten)]
        voa: VoaArgs,
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value = "-1", value_parser = rational, allow_negative_numbers = true)]
        z: Rat,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lowest-weight space Ω(W) and its A(V)-action
    Omega {
        #[command(flatten)]
        voa: VoaArgs,
        #[command(flatten)]
        module: ModuleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Level dimensions of F(U) and L(U) with the Frobenius check
    Induce {
        #[command(flatten)]
        voa: VoaArgs,
        /// Eigenvalue of the first generator's zero mode on the one-dimensional U
        #[arg(long, default_value = "0", value_parser = rational, allow_negative_numbers = true)]
        h: Rat,
        #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
        depth: i64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Residue identities and three-term identity on seeded lifted functionals
    Dualrep {
        #[command(flatten)]
        voa: VoaArgs,
        #[arg(long, default_value = "-1", value_parser = rational, allow_negative_numbers = true)]
        z: Rat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fusion dimension from a finite algebra, a bimodule and two modules
    Fusion {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        bimodule: PathBuf,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Full property suite
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VoaKind {
    Heisenberg,
    Virasoro,
    File,
}

#[derive(Args)]
struct VoaArgs {
    #[arg(long, value_enum, default_value = "virasoro")]
    voa: VoaKind,
    /// Central charge of the Virasoro VOA
    #[arg(long, default_value = "1/2", value_parser = rational, allow_negative_numbers = true)]
    c: Rat,
    #[arg(long, allow_negative_numbers = true)]
    cutoff: Option<i64>,
    /// Presentation JSON for --voa file
    #[arg(long)]
    voa_file: Option<PathBuf>,
}

#[derive(Args)]
struct ModuleArgs {
    /// Use F(U) for the one-dimensional U with this eigenvalue instead of the adjoint module
    #[arg(long, value_parser = rational, allow_negative_numbers = true)]
    h: Option<Rat>,
    #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
    depth: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn rational(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

enum Failure {
    Config(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Config(_) | Error::Domain(_) | Error::Io(_) | Error::Json(_) => Failure::Config(e.to_string()),
            e => Failure::Run(e),
        }
    }
}

type Outcome = Result<(Value, bool), Failure>;

const DEFAULT_CUTOFF: i64 = 6;

fn build_voa(args: &VoaArgs) -> Result<Arc<VoaPresentation>, Failure> {
    if args.cutoff.is_some_and(|n| n < 0) {
        return Err(Failure::Config("cutoff must be nonnegative".into()));
    }
    let n = args.cutoff.unwrap_or(DEFAULT_CUTOFF);
    let v = match args.voa {
        VoaKind::Heisenberg => make_heisenberg(n),
        VoaKind::Virasoro => make_virasoro(args.c.clone(), n),
        VoaKind::File => {
            let path = args.voa_file.as_ref().ok_or_else(|| Failure::Config("--voa file needs --voa-file".into()))?;
            let v = VoaPresentation::from_json(&read_json(path)?)?;
            if args.cutoff.is_some_and(|n| n != v.cutoff) {
                return Err(Failure::Config(format!("--cutoff {n} differs from the file's cutoff {}", v.cutoff)));
            }
            v
        }
    };
    Ok(Arc::new(v))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn first_generator(a: &ZhuAlgebra) -> Result<Vector, Failure> {
    let v = &a.voa;
    v.generator_index(0)
        .map(|i| unit(v.dim(), i))
        .ok_or_else(|| Failure::Config("the VOA has no strong generator in the presentation".into()))
}

fn one_dim(a: &ZhuAlgebra, h: &Rat) -> Result<ZhuModule, Failure> {
    Ok(ZhuModule::generated_by(a, &first_generator(a)?, h)?)
}

fn chosen_module(v: &Arc<VoaPresentation>, a: &ZhuAlgebra, m: &ModuleArgs) -> Result<ModulePresentation, Failure> {
    match &m.h {
        None => Ok(ModulePresentation::adjoint(v)),
        Some(h) => Ok(induce::f_module(a, &one_dim(a, h)?, m.depth)?.module),
    }
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(fmt_rat(x))).collect()))
            .collect(),
    )
}

fn vector_json(m: &ModulePresentation, v: &[Rat]) -> Value {
    let mut out = Map::new();
    for (i, c) in v.iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            out.insert(m.basis[i].label.clone(), Value::String(fmt_rat(c)));
        }
    }
    Value::Object(out)
}

fn zhu(voa: &VoaArgs) -> Outcome {
    let v = build_voa(voa)?;
    let a = ZhuAlgebra::build(&v)?;
    let checks = a.checks()?;
    let mut report = a.report_json(&checks);
    let passed = checks.passed();
    report["passed"] = json!(passed);
    Ok((report, passed))
}

fn bimodule(voa: &VoaArgs, m: &ModuleArgs, z: &Rat) -> Outcome {
    if num_traits::Zero::is_zero(z) {
        return Err(Failure::Config("z must be nonzero".into()));
    }
    let v = build_voa(voa)?;
    let a = ZhuAlgebra::build(&v)?;
    let w = Arc::new(chosen_module(&v, &a, m)?);
    let b = Bimodule::build(&w, z, &a)?;
    let checks = b.checks(&a)?;
    let mut report = b.report_json(&checks);
    let passed = checks.passed();
    report["passed"] = json!(passed);
    Ok((report, passed))
}

fn omega(voa: &VoaArgs, m: &ModuleArgs) -> Outcome {
    let v = build_voa(voa)?;
    let a = ZhuAlgebra::build(&v)?;
    let w = chosen_module(&v, &a, m)?;
    let om = omega_subspace(&w)?;
    let (action, witness) = match om.zhu_action(&w, &a) {
        Ok(ms) => {
            let u = ZhuModule { dim: om.dim(), action: ms };
            let ok = u.is_module(&a);
            (u.action, (!ok).then(|| "A(V)-action on Ω(W) is not a module".to_string()))
        }
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let passed = witness.is_none();
    let report = json!({
        "cutoff": w.cutoff,
        "moduleDim": w.dim(),
        "omegaDim": om.dim(),
        "basis": om.basis.iter().map(|b| vector_json(&w, b)).collect::<Vec<_>>(),
        "zhuAction": action.iter().map(matrix_json).collect::<Vec<_>>(),
        "passed": passed,
        "witness": witness,
    });
    Ok((report, passed))
}

fn induce_cmd(voa: &VoaArgs, h: &Rat, depth: i64) -> Outcome {
    if depth < 0 {
        return Err(Failure::Config("depth must be nonnegative".into()));
    }
    let v = build_voa(voa)?;
    let a = ZhuAlgebra::build(&v)?;
    let u = one_dim(&a, h)?;
    let f = induce::f_module(&a, &u, depth)?;
    let l = induce::l_module(&f)?;
    let frob = induce::frobenius_check(&a, &u, &f, &f.module, depth)?;
    let graded = induce::l0_is_graded(&f.module)?;
    let passed = frob.equal && graded;
    let witness = (!passed).then(|| {
        if graded {
            format!("Frobenius dims differ: {} vs {}", frob.dim1, frob.dim2)
        } else {
            "L(0) does not act as the level grading".into()
        }
    });
    let report = json!({
        "cutoff": v.cutoff,
        "h": fmt_rat(h),
        "depth": depth,
        "fLevelDims": f.level_dims(),
        "lLevelDims": l.level_dims(),
        "relations": f.relations,
        "frobenius": frob,
        "l0Graded": graded,
        "passed": passed,
        "witness": witness,
    });
    Ok((report, passed))
}

fn dualrep_cmd(voa: &VoaArgs, z: &Rat, seed: u64, samples: usize) -> Outcome {
    if num_traits::Zero::is_zero(z) {
        return Err(Failure::Config("z must be nonzero".into()));
    }
    let v = build_voa(voa)?;
    let a = ZhuAlgebra::build(&v)?;
    let w = Arc::new(ModulePresentation::adjoint(&v));
    let b = Bimodule::build(&w, z, &a)?;
    let s = DualSpace::new(w, z.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut residue, mut three_term) = (0, 0);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let u_dim = rng.gen_range(1..=2);
        let mut phi = Matrix::zeros(u_dim, b.dim());
        for i in 0..u_dim {
            for j in 0..b.dim() {
                phi[(i, j)] = zhukit::rat::rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            }
        }
        let f = s.lift_functional(&b, &phi)?;
        let r = dualrep::residue_identities(&s, &f, 3)?;
        residue += r.checked;
        failures.extend(r.failures);
        for vi in 0..v.dim() {
            if v.weight(vi) <= 2 && f.certs.contains_key(&vi) {
                let r = dualrep::three_term_check(&s, &f, vi, (-4, 2), (-4, 2))?;
                three_term += r.checked;
                failures.extend(r.failures);
            }
        }
    }
    let passed = failures.is_empty();
    let report = json!({
        "cutoff": v.cutoff,
        "z": fmt_rat(z),
        "seed": seed,
        "samples": samples,
        "residueIdentitiesChecked": residue,
        "threeTermChecked": three_term,
        "passed": passed,
        "witness": failures.first(),
    });
    Ok((report, passed))
}

fn fusion_cmd(algebra: &Path, bimodule: &Path, left: &Path, right: &Path) -> Outcome {
    let a = FinAlgebra::from_json(&read_json(algebra)?)?;
    let b = FinBimodule::from_json(&read_json(bimodule)?, a.dim)?;
    let u1 = FinModule::from_json(&read_json(left)?, a.dim)?;
    let u2 = FinModule::from_json(&read_json(right)?, a.dim)?;
    let witness = if !a.is_valid() {
        Some("algebra is not associative and unital")
    } else if !b.is_bimodule(&a) {
        Some("bimodule axioms fail")
    } else if !u1.is_module(&a) {
        Some("left input is not a module")
    } else if !u2.is_module(&a) {
        Some("right input is not a module")
    } else {
        None
    };
    let mut report = json!({
        "algebraDim": a.dim,
        "bimoduleDim": b.dim,
        "leftDim": u1.dim,
        "rightDim": u2.dim,
    });
    let mut passed = witness.is_none();
    if passed {
        report["fusionDim"] = json!(fusion::fusion_dim(&b, &u1, &u2));
        if a.theta.is_some() {
            let d = fusion::d_iso_check(&a, &b, &u1, &u2)?;
            passed = d.equal;
            report["dualIsomorphism"] = json!({"lhs": d.lhs, "rhs": d.rhs, "equal": d.equal});
        }
    }
    report["passed"] = json!(passed);
    report["witness"] = json!(witness
        .map(str::to_string)
        .or_else(|| (!passed).then(|| "dual-isomorphism dimensions differ".to_string())));
    Ok((report, passed))
}

fn verify_cmd(seed: u64) -> Result<(Value, bool, String), Failure> {
    let r = verify::run_all(seed)?;
    Ok((r.to_json(), r.passed, r.to_csv()))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        x => out.push((prefix.to_string(), x.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, x) in rows {
        out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&x)));
    }
    out
}

fn emit(out: &OutArgs, report: &Value, csv: Option<String>) -> Result<(), Failure> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Csv => csv.unwrap_or_else(|| to_csv(report)),
    };
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(s) = std::env::var("ZHUKIT_THREADS") else { return Ok(()) };
    let n: usize = s
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("ZHUKIT_THREADS must be a positive integer, got {s:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    let (out, report, passed, csv) = match &cli.command {
        Command::Zhu { voa, out } => {
            let (r, p) = zhu(voa)?;
            (out, r, p, None)
        }
        Command::Bimodule { voa, module, z, out } => {
            let (r, p) = bimodule(voa, module, z)?;
            (out, r, p, None)
        }
        Command::Omega { voa, module, out } => {
            let (r, p) = omega(voa, module)?;
            (out, r, p, None)
        }
        Command::Induce { voa, h, depth, out } => {
            let (r, p) = induce_cmd(voa, h, *depth)?;
            (out, r, p, None)
        }
        Command::Dualrep { voa, z, seed, samples, out } => {
            let (r, p) = dualrep_cmd(voa, z, *seed, *samples)?;
            (out, r, p, None)
        }
        Command::Fusion {
            algebra,
            bimodule,
            left,
            right,
            out,
        } => {
            let (r, p) = fusion_cmd(algebra, bimodule, left, right)?;
            (out, r, p, None)
        }
        Command::Verify { seed, out } => {
            let (r, p, c) = verify_cmd(*seed)?;
            (out, r, p, Some(c))
        }
    };
    emit(out, &report, csv)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("zhukit: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("zhukit: {e}");
            ExitCode::from(1)
        }
    }
}
