//! Build configuration: canonical JSON file naming inputs, assets and
//! knobs. The config hash pins the parsed content, not the file bytes,
//! so formatting changes do not move the build id.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use factforge_core::canon::{self, canon_serialize, Value};
use factforge_core::ids::sha256_hex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {0}")]
    Unreadable(PathBuf),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// One language edition's inputs.
#[derive(Clone, Debug)]
pub struct LangInput {
    pub language: String,
    pub pages: PathBuf,
    pub redirects: Option<PathBuf>,
    pub disambiguations: Option<PathBuf>,
    pub pack: PathBuf,
}

/// The parsed build configuration.
#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub snapshot_date: String,
    pub entities: PathBuf,
    pub languages: Vec<LangInput>,
    pub policy: PathBuf,
    pub schema_map: PathBuf,
    pub relation_map: PathBuf,
    pub out: PathBuf,
    /// Conservative title-match fallback; the default build disables it.
    pub title_fallback: bool,
    /// Relation traversal cap; 1 removes the hop-2 edges.
    pub hop_cap: u8,
    /// Keep only relation edges at or above this reliability tier.
    pub relation_min_tier: Option<factforge_core::relations::Tier>,
    /// Scale edge confidence by an inverse-log out-degree prior.
    pub hub_downweight: bool,
    /// Shard counts per record family.
    pub shards: BTreeMap<String, u32>,
    /// KGC property vocabulary size.
    pub vocab_size: usize,
    pub mfc_total: usize,
    pub mfc_ratio: (f64, f64, f64),
    pub description_units: usize,
    pub description_token_cap: usize,
    /// Content hash of the parsed configuration.
    pub config_hash: String,
}

fn default_shards() -> BTreeMap<String, u32> {
    [
        ("statements".to_string(), 4u32),
        ("factsenses".to_string(), 4),
        ("synsets".to_string(), 4),
        ("relations".to_string(), 2),
        ("ungrounded".to_string(), 1),
    ]
    .into()
}

impl BuildConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| ConfigError::Unreadable(path.to_path_buf()))?;
        let value = canon::parse(&text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_value(&value, base)
    }

    pub fn from_value(v: &Value, base: &Path) -> Result<Self, ConfigError> {
        let str_field = |key: &str| -> Result<String, ConfigError> {
            v.get(key)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| ConfigError::Invalid(format!("missing '{}'", key)))
        };
        let path_field = |key: &str| -> Result<PathBuf, ConfigError> {
            Ok(base.join(str_field(key)?))
        };
        let mut languages = Vec::new();
        let Some(langs) = v.get("languages").and_then(Value::as_arr) else {
            return Err(ConfigError::Invalid("missing 'languages'".to_string()));
        };
        for entry in langs {
            let lang_str = |key: &str| -> Result<String, ConfigError> {
                entry
                    .get(key)
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| ConfigError::Invalid(format!("language entry missing '{}'", key)))
            };
            languages.push(LangInput {
                language: lang_str("language")?,
                pages: base.join(lang_str("pages")?),
                redirects: entry
                    .get("redirects")
                    .and_then(Value::as_str)
                    .map(|s| base.join(s)),
                disambiguations: entry
                    .get("disambiguations")
                    .and_then(Value::as_str)
                    .map(|s| base.join(s)),
                pack: base.join(lang_str("pack")?),
            });
        }
        let mut shards = default_shards();
        if let Some(Value::Map(m)) = v.get("shards") {
            for (family, n) in m {
                let count = n
                    .as_num()
                    .map(|d| d.to_f64() as u32)
                    .ok_or_else(|| ConfigError::Invalid("shard count not a number".to_string()))?;
                shards.insert(family.clone(), count.max(1));
            }
        }
        let num_or = |key: &str, default: f64| -> f64 {
            v.get(key).and_then(Value::as_num).map(|d| d.to_f64()).unwrap_or(default)
        };
        let ratio = match v.get("mfc_ratio").and_then(Value::as_arr) {
            Some([a, b, c]) => (
                a.as_num().map(|d| d.to_f64()).unwrap_or(0.34),
                b.as_num().map(|d| d.to_f64()).unwrap_or(0.33),
                c.as_num().map(|d| d.to_f64()).unwrap_or(0.33),
            ),
            _ => (0.34, 0.33, 0.33),
        };
        let out = match std::env::var(crate::OUT_ENV) {
            Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => path_field("out")?,
        };
        Ok(BuildConfig {
            snapshot_date: str_field("snapshot_date")?,
            entities: path_field("entities")?,
            languages,
            policy: path_field("policy")?,
            schema_map: path_field("schema_map")?,
            relation_map: path_field("relation_map")?,
            out,
            title_fallback: v.get("title_fallback").and_then(Value::as_bool).unwrap_or(false),
            hop_cap: num_or("hop_cap", 2.0) as u8,
            relation_min_tier: match v.get("relation_min_tier").and_then(Value::as_str) {
                Some(t) => Some(
                    factforge_core::relations::Tier::parse(t)
                        .ok_or_else(|| ConfigError::Invalid(format!("unknown tier '{}'", t)))?,
                ),
                None => None,
            },
            hub_downweight: v.get("hub_downweight").and_then(Value::as_bool).unwrap_or(false),
            shards,
            vocab_size: num_or("vocab_size", 320.0) as usize,
            mfc_total: num_or("mfc_total", 600.0) as usize,
            mfc_ratio: ratio,
            description_units: num_or("description_units", 16.0) as usize,
            description_token_cap: num_or("description_token_cap", 256.0) as usize,
            config_hash: sha256_hex(&canon_serialize(v)),
        })
    }
}

/// Parse the schema map TSV: `language<TAB>template<TAB>param<TAB>PID`.
/// Lines starting with `#` are comments.
pub type SchemaMap =
    BTreeMap<String, BTreeMap<(String, String), factforge_core::model::PropertyId>>;

pub fn parse_schema_map(text: &str) -> Result<SchemaMap, ConfigError> {
    let mut map: SchemaMap = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [language, template, param, pid] = cols.as_slice() else {
            return Err(ConfigError::Invalid(format!("schema map line {}: need 4 columns", i + 1)));
        };
        let property = factforge_core::model::PropertyId::new(*pid)
            .map_err(|e| ConfigError::Invalid(format!("schema map line {}: {}", i + 1, e)))?;
        map.entry(language.to_string())
            .or_default()
            .insert((template.to_string(), param.to_string()), property);
    }
    Ok(map)
}

/// The infobox allowlist for one language is the set of templates the
/// schema map names for it.
pub fn infobox_allowlist(schema: &SchemaMap, language: &str) -> std::collections::BTreeSet<String> {
    schema
        .get(language)
        .map(|m| m.keys().map(|(template, _)| template.clone()).collect())
        .unwrap_or_default()
}
