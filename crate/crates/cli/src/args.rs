use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "littlewood", version, about = "Exact continued-fraction constructions and certificates for Littlewood products")]
pub struct Cli {
    /// Output format (default: table for `gosper`, json otherwise).
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Seed for every random choice (property suites, seeded markers).
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a partner beta for alpha and print the construction record.
    Construct(ConstructArgs),
    /// Certify a construction record and append certificates to the store.
    Certify(CertifyArgs),
    /// Continued fraction of a Möbius image of alpha.
    Gosper(GosperArgs),
    /// Scans and property suites.
    #[command(subcommand)]
    Scan(ScanCommand),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// alpha as `0; pre | (period)`; repeat for T3.
    #[arg(long, required = true)]
    pub alpha: Vec<String>,
    /// T1, T2, T3 or palindromic.
    #[arg(long)]
    pub thm: String,
    /// Partial-quotient bound M (defaults to the bound of alpha).
    #[arg(long = "M")]
    pub m: Option<u64>,
    /// Exponent for T2 and palindromic, as `p/q`.
    #[arg(long)]
    pub eps: Option<String>,
    /// Geometric growth ratio for T2 and palindromic, as `p/q`.
    #[arg(long)]
    pub ratio: Option<String>,
    /// Explicit block lengths instead of a ratio, comma separated.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<u64>>,
    /// `power(p/q)` or `inverse_log`, for T1 and T3.
    #[arg(long)]
    pub phi: Option<String>,
    /// Marker rule: `default`, `V`, `const:V`, `list:a,b,...`, `seeded[:S]`.
    #[arg(long = "t", default_value = "default")]
    pub t: String,
    /// Number of partial quotients of beta to include.
    #[arg(long = "prefix-len", default_value_t = 200)]
    pub prefix_len: usize,
    /// Number of schedule terms to include (fewer if the schedule ends).
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    /// Write the record here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Construction record written by `construct` (`-` for stdin).
    #[arg(long)]
    pub record: PathBuf,
    /// Index range `a..b` (inclusive) or a single index.
    #[arg(long = "j", default_value = "2..3")]
    pub j: String,
    /// Target width is bound / divisor.
    #[arg(long, default_value_t = 8)]
    pub divisor: u32,
    /// Width halvings before a verdict is left indeterminate.
    #[arg(long = "max-halvings", default_value_t = 6)]
    pub max_halvings: u32,
    #[command(flatten)]
    pub store: StoreArgs,
}

#[derive(Args, Debug)]
pub struct StoreArgs {
    /// JSON-lines certificate store to append to.
    #[arg(long, env = "LITTLEWOOD_STORE")]
    pub store: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GosperArgs {
    #[arg(long)]
    pub alpha: String,
    /// `a,b,c,d` for x -> (a x + b)/(c x + d).
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    /// Number of fractional partial quotients to print.
    #[arg(short = 'n', default_value_t = 20)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, conflicts_with = "record")]
    pub beta: Option<String>,
    /// Take alpha and beta from a construction record.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ScanCommand {
    /// Exhaustive and randomized continuant and approximation suites.
    Lemmas,
    /// Search for small integer relations A alpha + B beta + C = 0.
    Independence {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "H", default_value_t = 5)]
        h: u32,
        #[arg(long, default_value = "1/1000000")]
        width: String,
        #[arg(long = "max-depth", default_value_t = 512)]
        max_depth: usize,
    },
    /// Minimum of q^2 ||q alpha|| ||q beta|| over q <= Q.
    LowerBound {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "Q", default_value_t = 1000)]
        q: u64,
    },
    /// q_n ||q_n alpha|| for the first convergent denominators.
    Baseline {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Dual-form witnesses from repetitions U U^x.
    Thm4 {
        /// alpha; by default the nested repetition number built from `--seed-word`.
        #[arg(long)]
        alpha: Option<String>,
        /// Repeated words U_k (comma separated); required with `--alpha`.
        #[arg(long = "u")]
        u: Vec<String>,
        #[arg(long = "seed-word", default_value = "1,2")]
        seed_word: String,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value = "1")]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// Palindrome witnesses from prefixes V U Ū.
    Thm5 {
        #[arg(long)]
        alpha: String,
        /// `V:U` with comma separated words; repeat for several k.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[command(flatten)]
        store: StoreArgs,
    },
    /// q^2 products at palindromic prefixes.
    Thm6 {
        /// alpha; by default the palindromic construction over `--base`.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value = "0; | (2)")]
        base: String,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value = "19")]
        ratio: String,
        /// Number of palindromic prefixes to use.
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Search limit for palindromic prefixes of an explicit alpha.
        #[arg(long = "max-len", default_value_t = 256)]
        max_len: usize,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[command(flatten)]
        store: StoreArgs,
    },
}
