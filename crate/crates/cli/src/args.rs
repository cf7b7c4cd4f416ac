use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use steenrod_core::Bidegree;

#[derive(Debug, Parser)]
#[command(name = "steenrod", version, about = "Mod-l Steenrod, etale and motivic cohomology operations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// The prime l.
    #[arg(long = "l", value_name = "L")]
    pub ell: Option<u32>,
    /// Period d of the twist, d | l-1.
    #[arg(long)]
    pub d: Option<u32>,
    /// Coefficient model: trivial, alg-closed, real-etale or a JSON file.
    #[arg(long)]
    pub model: Option<String>,
    /// Emit JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adem-reduce an expression; with --source apply it to a class x.
    Normalize {
        expr: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
        mode: ModeArg,
        #[arg(long, value_name = "N,I")]
        source: Option<BidegreeArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Admissible sequences up to a degree.
    Basis {
        #[arg(long)]
        max_deg: i64,
        #[arg(long)]
        max_excess: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Free generators of H*(K(Z/l, n)).
    Generators {
        #[arg(long, value_name = "Kn")]
        space: SpaceArg,
        #[arg(long)]
        max_deg: i64,
        /// Weight of the fundamental class.
        #[arg(long, default_value_t = 1)]
        i: i64,
        /// Build the list by iterated transgression instead of admissible sequences.
        #[arg(long)]
        borel: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension table of H*(K(Z/l, n)) by bidegree.
    Poincare {
        #[arg(long, value_name = "Kn")]
        space: SpaceArg,
        #[arg(long)]
        max_deg: i64,
        #[arg(long)]
        max_wt: Option<i64>,
        #[arg(long, default_value_t = 1)]
        i: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate a ring of operations.
    Classify {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Source degree n (etale-hn, motivic-w1, motivic-w0, conjecture).
        #[arg(long, default_value_t = 1)]
        n: i64,
        /// Source weight or twist i.
        #[arg(long, default_value_t = 1)]
        i: i64,
        #[arg(long)]
        max_deg: i64,
        #[arg(long)]
        max_wt: Option<i64>,
        #[arg(long)]
        strict_b: bool,
        #[arg(long)]
        excess_threshold: Option<i64>,
        /// Also list conjecture candidates removed by the weight filter.
        #[arg(long)]
        show_excluded: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Rewrite P^a as a Bott multiple of P_V^a or back.
    Convert {
        #[arg(long, value_name = "N,I")]
        source: BidegreeArg,
        #[arg(long)]
        a: i64,
        #[arg(long, value_enum, default_value_t = DirectionArg::PToPv)]
        direction: DirectionArg,
        #[command(flatten)]
        common: Common,
    },
    /// Degree-1 operations on H^{1,i} by Galois descent.
    Descent {
        #[arg(long)]
        i: i64,
        #[arg(long)]
        max_deg: i64,
        /// Weight cap; defaults to --max-deg.
        #[arg(long)]
        max_wt: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites.
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Classical,
    Motivic,
    Etale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    EtaleH1,
    EtaleHn,
    MotivicW1,
    MotivicW0,
    Deg1Zeta,
    Deg1Descent,
    Conjecture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    PToPv,
    PvToP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BidegreeArg(pub Bidegree);

impl FromStr for BidegreeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (n, i) = s.split_once(',').ok_or_else(|| format!("expected N,I, got {s:?}"))?;
        let n = n.trim().parse().map_err(|_| format!("bad degree {n:?}"))?;
        let i = i.trim().parse().map_err(|_| format!("bad weight {i:?}"))?;
        Ok(Self(Bidegree::new(n, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceArg(pub i64);

impl FromStr for SpaceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let n = s
            .strip_prefix('K')
            .and_then(|n| n.parse::<i64>().ok())
            .filter(|n| *n >= 1)
            .ok_or_else(|| format!("expected Kn with n >= 1, got {s:?}"))?;
        Ok(Self(n))
    }
}
