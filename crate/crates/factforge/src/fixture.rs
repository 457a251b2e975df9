//! Deterministic demo corpus: a synthetic entity dump, page dumps in
//! three languages, link tables and the default asset files, all
//! reproducible from a seed. Used by the test suite and by the `fixture`
//! subcommand to materialize a runnable workspace.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use factforge_core::canon::{canon_string, Value};
use factforge_core::model::{EntityId, FactStatement, PropertyId, Rank, TypedValue};
use factforge_core::rng::SplitMix64;
use factforge_core::statements::statement_confidence;
use factforge_core::Decimal;

use crate::defaults;

/// Fixture shape knobs. The defaults satisfy the demo-corpus floor of
/// 200 pages over three languages and 2,000 statements.
#[derive(Clone, Debug)]
pub struct FixtureSpec {
    pub people: usize,
    pub cities: usize,
    pub countries: usize,
    pub occupations: usize,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec { people: 240, cities: 70, countries: 12, occupations: 14, seed: 0xF1C7_0001 }
    }
}

/// Paths of a generated fixture workspace.
#[derive(Clone, Debug)]
pub struct FixturePaths {
    pub root: PathBuf,
    pub config: PathBuf,
    pub entities: PathBuf,
    pub pages: BTreeMap<String, PathBuf>,
}

const FIRST_NAMES: &[&str] = &[
    "Alda", "Boris", "Cleo", "Doran", "Edda", "Falk", "Gera", "Hale", "Iris", "Joren", "Kaia",
    "Lino", "Mara", "Nils", "Orla", "Pavo", "Runa", "Sten", "Tilda", "Ursa",
];
const LAST_NAMES: &[&str] = &[
    "Abern", "Boldt", "Crast", "Dorn", "Elsen", "Fenwick", "Garrel", "Holt", "Ivens", "Jasper",
    "Kerns", "Lund",
];
const CITY_PREFIX: &[&str] =
    &["North", "South", "East", "West", "New", "Old", "High", "Low", "Fair", "Stone"];
const CITY_STEM: &[&str] = &["bury", "ford", "haven", "dale", "field", "mont", "wick"];
const COUNTRY_NAMES: &[&str] = &[
    "Aldoria", "Bravia", "Corin", "Delmar", "Estria", "Fenland", "Gorvia", "Halmstad", "Istrena",
    "Jorvik", "Kestrel", "Lumera",
];
const OCCUPATIONS_EN: &[&str] = &[
    "physicist", "poet", "architect", "botanist", "historian", "engineer", "painter", "composer",
    "surgeon", "cartographer", "linguist", "astronomer", "geologist", "sculptor",
];
const OCCUPATIONS_DE: &[&str] = &[
    "Physiker", "Dichter", "Architekt", "Botaniker", "Historiker", "Ingenieur", "Maler",
    "Komponist", "Chirurg", "Kartograf", "Linguist", "Astronom", "Geologe", "Bildhauer",
];
const OCCUPATIONS_FR: &[&str] = &[
    "physicien", "poète", "architecte", "botaniste", "historien", "ingénieur", "peintre",
    "compositeur", "chirurgien", "cartographe", "linguiste", "astronome", "géologue", "sculpteur",
];

const LANGS: &[&str] = &["en", "de", "fr"];

/// Per-language sitelink probability in percent.
fn sitelink_chance(lang: &str) -> u64 {
    match lang {
        "en" => 95,
        "de" => 80,
        _ => 65,
    }
}

struct Person {
    qid: String,
    name: String,
    gender: &'static str,
    birth: (i64, u8, u8),
    birthplace: usize,
    occupation: usize,
    spouse: Option<usize>,
    child: Option<usize>,
    /// Height in centimetres; the oddity field may change the claim unit.
    height_cm: Option<u32>,
    death: Option<(i64, u8, u8)>,
    marriage_year: Option<i64>,
    oddity: Oddity,
    sitelinks: BTreeMap<String, String>,
    refs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Oddity {
    None,
    /// The en sitelink points at a redirect title.
    RedirectSitelink,
    /// The de sitelink resolves to a disambiguation page.
    DisambigSitelink,
    /// The fr page contains only a non-allowlisted template.
    TemplateOnlyPage,
    /// The spouse is mentioned only under "See also".
    SpouseInSeeAlsoOnly,
    /// The height sentence hedges with an approximation marker and the
    /// infobox omits it.
    ApproximateHeight,
    /// The height claim carries a wrong unit (kilograms), so the correct
    /// number in the text fails the unit constraint.
    WrongUnitHeight,
    /// A second birth-date claim one day off, normal rank.
    ConflictingBirth,
    /// A second birthplace claim, deprecated rank.
    DeprecatedBirthplace,
}

struct City {
    qid: String,
    name: String,
    country: usize,
    lat: String,
    lon: String,
    population: u64,
    inception: i64,
    sitelinks: BTreeMap<String, String>,
}

struct Country {
    qid: String,
    name: String,
    capital: usize,
    sitelinks: BTreeMap<String, String>,
}

struct Occupation {
    qid: String,
    labels: BTreeMap<String, String>,
    sitelinks: BTreeMap<String, String>,
}

struct World {
    people: Vec<Person>,
    cities: Vec<City>,
    countries: Vec<Country>,
    occupations: Vec<Occupation>,
}

fn build_world(spec: &FixtureSpec) -> World {
    let mut countries = Vec::new();
    for i in 0..spec.countries {
        countries.push(Country {
            qid: format!("Q{}", 3001 + i),
            name: COUNTRY_NAMES[i % COUNTRY_NAMES.len()].to_string(),
            capital: i, // city index; cities are assigned below
            sitelinks: BTreeMap::new(),
        });
    }
    let mut cities = Vec::new();
    for i in 0..spec.cities {
        let name = format!(
            "{}{}",
            CITY_PREFIX[i % CITY_PREFIX.len()],
            CITY_STEM[(i / CITY_PREFIX.len()) % CITY_STEM.len()]
        );
        let mut rng = SplitMix64::new(spec.seed ^ (0xC1 + i as u64));
        cities.push(City {
            qid: format!("Q{}", 2001 + i),
            name,
            country: i % spec.countries,
            lat: format!("{}.{:02}", (rng.below(140) as i64) - 70, rng.below(100)),
            lon: format!("{}.{:03}", (rng.below(300) as i64) - 150, rng.below(1000)),
            population: 1_000 + rng.below(2_000_000),
            inception: 900 + rng.below(1100) as i64,
            sitelinks: BTreeMap::new(),
        });
    }
    let mut occupations = Vec::new();
    for i in 0..spec.occupations {
        let mut labels = BTreeMap::new();
        labels.insert("en".to_string(), OCCUPATIONS_EN[i % OCCUPATIONS_EN.len()].to_string());
        labels.insert("de".to_string(), OCCUPATIONS_DE[i % OCCUPATIONS_DE.len()].to_string());
        labels.insert("fr".to_string(), OCCUPATIONS_FR[i % OCCUPATIONS_FR.len()].to_string());
        occupations.push(Occupation {
            qid: format!("Q{}", 4001 + i),
            labels,
            sitelinks: BTreeMap::new(),
        });
    }
    let mut people = Vec::new();
    for i in 0..spec.people {
        let mut rng = SplitMix64::new(spec.seed ^ (0xA1_0000 + i as u64));
        let name = format!(
            "{} {}",
            FIRST_NAMES[i % FIRST_NAMES.len()],
            LAST_NAMES[(i / FIRST_NAMES.len()) % LAST_NAMES.len()]
        );
        let oddity = match i {
            0..=9 => Oddity::RedirectSitelink,
            10..=12 => Oddity::DisambigSitelink,
            13..=15 => Oddity::TemplateOnlyPage,
            16..=23 => Oddity::SpouseInSeeAlsoOnly,
            24..=31 => Oddity::ApproximateHeight,
            32..=37 => Oddity::WrongUnitHeight,
            38..=52 => Oddity::ConflictingBirth,
            53..=58 => Oddity::DeprecatedBirthplace,
            _ => Oddity::None,
        };
        let birth = (
            1900 + rng.below(100) as i64,
            1 + rng.below(12) as u8,
            1 + rng.below(28) as u8,
        );
        let spouse = if rng.below(100) < 60 && i + 1 < spec.people && i % 2 == 0 {
            Some(i + 1)
        } else if i > 0 && people_spouse_back(&people, i) {
            Some(i - 1)
        } else {
            None
        };
        let child = if rng.below(100) < 40 && i + 2 < spec.people { Some(i + 2) } else { None };
        let height_cm = if rng.below(100) < 70 { Some(150 + rng.below(50) as u32) } else { None };
        let death = if rng.below(100) < 25 {
            Some((birth.0 + 40 + rng.below(50) as i64, 1 + rng.below(12) as u8, 1 + rng.below(28) as u8))
        } else {
            None
        };
        people.push(Person {
            qid: format!("Q{}", 1001 + i),
            name,
            gender: if rng.below(2) == 0 { "Q6581097" } else { "Q6581072" },
            birth,
            birthplace: rng.below(spec.cities as u64) as usize,
            occupation: rng.below(spec.occupations as u64) as usize,
            spouse,
            child,
            height_cm,
            death,
            marriage_year: if spouse.is_some() { Some(birth.0 + 20 + rng.below(20) as i64) } else { None },
            oddity,
            sitelinks: BTreeMap::new(),
            refs: rng.below(4) as usize,
        });
    }
    // Sitelinks per language with stable per-(entity, lang) draws.
    let mut world = World { people, cities, countries, occupations };
    for lang in LANGS {
        for i in 0..world.people.len() {
            let mut rng = SplitMix64::new(spec.seed ^ hash2(0xB0, i as u64, lang));
            let p = &mut world.people[i];
            let forced = matches!(p.oddity, Oddity::RedirectSitelink | Oddity::DisambigSitelink | Oddity::TemplateOnlyPage | Oddity::SpouseInSeeAlsoOnly | Oddity::ApproximateHeight | Oddity::WrongUnitHeight);
            if forced || rng.below(100) < sitelink_chance(lang) {
                let title = match (p.oddity, *lang) {
                    (Oddity::RedirectSitelink, "en") => format!("{} (old)", p.name),
                    _ => p.name.clone(),
                };
                p.sitelinks.insert(lang.to_string(), title);
            }
        }
        for c in world.cities.iter_mut() {
            c.sitelinks.insert(lang.to_string(), c.name.clone());
        }
        for c in world.countries.iter_mut() {
            c.sitelinks.insert(lang.to_string(), c.name.clone());
        }
        for o in world.occupations.iter_mut() {
            o.sitelinks.insert(lang.to_string(), o.labels[*lang].clone());
        }
    }
    world
}

fn people_spouse_back(people: &[Person], i: usize) -> bool {
    people.get(i - 1).is_some_and(|p| p.spouse == Some(i))
}

fn hash2(tag: u64, a: u64, lang: &str) -> u64 {
    let mut h = tag ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for b in lang.bytes() {
        h = h.rotate_left(7) ^ b as u64;
    }
    h
}

// Claim JSON builders in the dump's native shape.

fn snak_entity(pid: &str, qid: &str) -> Value {
    Value::map([
        ("snaktype", Value::str("value")),
        ("property", Value::str(pid)),
        ("datatype", Value::str("wikibase-item")),
        (
            "datavalue",
            Value::map([
                ("type", Value::str("wikibase-entityid")),
                ("value", Value::map([("id", Value::str(qid))])),
            ]),
        ),
    ])
}

fn snak_time(pid: &str, y: i64, m: u8, d: u8, precision: u32) -> Value {
    let time = format!("+{:04}-{:02}-{:02}T00:00:00Z", y, m, d);
    Value::map([
        ("snaktype", Value::str("value")),
        ("property", Value::str(pid)),
        ("datatype", Value::str("time")),
        (
            "datavalue",
            Value::map([
                ("type", Value::str("time")),
                (
                    "value",
                    Value::map([
                        ("time", Value::str(time)),
                        ("precision", Value::int(precision as i64)),
                        (
                            "calendarmodel",
                            Value::str("http://www.wikidata.org/entity/Q1985727"),
                        ),
                    ]),
                ),
            ]),
        ),
    ])
}

fn snak_quantity(pid: &str, amount: &str, unit: &str) -> Value {
    let unit_field = if unit == "1" {
        "1".to_string()
    } else {
        format!("http://www.wikidata.org/entity/{}", unit)
    };
    Value::map([
        ("snaktype", Value::str("value")),
        ("property", Value::str(pid)),
        ("datatype", Value::str("quantity")),
        (
            "datavalue",
            Value::map([
                ("type", Value::str("quantity")),
                (
                    "value",
                    Value::map([
                        ("amount", Value::str(format!("+{}", amount))),
                        ("unit", Value::str(unit_field)),
                    ]),
                ),
            ]),
        ),
    ])
}

fn snak_coordinate(pid: &str, lat: &str, lon: &str) -> Value {
    Value::map([
        ("snaktype", Value::str("value")),
        ("property", Value::str(pid)),
        ("datatype", Value::str("globecoordinate")),
        (
            "datavalue",
            Value::map([
                ("type", Value::str("globecoordinate")),
                (
                    "value",
                    Value::map([
                        ("latitude", Value::Num(Decimal::parse(lat).unwrap())),
                        ("longitude", Value::Num(Decimal::parse(lon).unwrap())),
                        ("precision", Value::Num(Decimal::parse("0.0001").unwrap())),
                    ]),
                ),
            ]),
        ),
    ])
}

struct ClaimBuilder {
    claims: BTreeMap<String, Vec<Value>>,
    qid: String,
    counter: u32,
}

impl ClaimBuilder {
    fn new(qid: &str) -> Self {
        ClaimBuilder { claims: BTreeMap::new(), qid: qid.to_string(), counter: 0 }
    }

    fn add(&mut self, pid: &str, mainsnak: Value, rank: &str, refs: usize, qualifiers: Option<Value>) {
        self.counter += 1;
        let mut fields = vec![
            ("id", Value::str(format!("{}${}", self.qid, self.counter))),
            ("mainsnak", mainsnak),
            ("rank", Value::str(rank)),
        ];
        if refs > 0 {
            let blocks: Vec<Value> = (0..refs)
                .map(|r| {
                    Value::map([(
                        "snaks",
                        Value::map([(
                            "P854",
                            Value::Arr(vec![Value::map([
                                ("snaktype", Value::str("value")),
                                ("property", Value::str("P854")),
                                ("datatype", Value::str("string")),
                                (
                                    "datavalue",
                                    Value::map([
                                        ("type", Value::str("string")),
                                        (
                                            "value",
                                            Value::str(format!(
                                                "https://example.org/source/{}/{}",
                                                self.qid, r
                                            )),
                                        ),
                                    ]),
                                ),
                            ])]),
                        )]),
                    )])
                })
                .collect();
            fields.push(("references", Value::Arr(blocks)));
        }
        if let Some(quals) = qualifiers {
            fields.push(("qualifiers", quals));
        }
        self.claims.entry(pid.to_string()).or_default().push(Value::map(fields));
    }
}

fn entity_json(
    qid: &str,
    labels: &BTreeMap<String, String>,
    sitelinks: &BTreeMap<String, String>,
    claims: BTreeMap<String, Vec<Value>>,
) -> String {
    let labels_v: BTreeMap<String, Value> = labels
        .iter()
        .map(|(lang, text)| {
            (
                lang.clone(),
                Value::map([("language", Value::str(lang.clone())), ("value", Value::str(text.clone()))]),
            )
        })
        .collect();
    let sitelinks_v: BTreeMap<String, Value> = sitelinks
        .iter()
        .map(|(lang, title)| {
            (
                format!("{}wiki", lang),
                Value::map([
                    ("site", Value::str(format!("{}wiki", lang))),
                    ("title", Value::str(title.clone())),
                ]),
            )
        })
        .collect();
    let claims_v: BTreeMap<String, Value> =
        claims.into_iter().map(|(pid, list)| (pid, Value::Arr(list))).collect();
    canon_string(&Value::map([
        ("id", Value::str(qid)),
        ("type", Value::str("item")),
        ("modified", Value::str("2025-11-01T00:00:00Z")),
        ("labels", Value::Map(labels_v)),
        ("claims", Value::Map(claims_v)),
        ("sitelinks", Value::Map(sitelinks_v)),
    ]))
}

fn same_labels(name: &str) -> BTreeMap<String, String> {
    LANGS.iter().map(|l| (l.to_string(), name.to_string())).collect()
}

fn date_surface(lang: &str, y: i64, m: u8, d: u8) -> String {
    let months = match lang {
        "de" => defaults::language_pack("de").unwrap().lexical.month_names,
        "fr" => defaults::language_pack("fr").unwrap().lexical.month_names,
        _ => defaults::language_pack("en").unwrap().lexical.month_names,
    };
    let month = months[(m - 1) as usize].clone();
    match lang {
        "de" => format!("{}. {} {}", d, month, y),
        "fr" => format!("{} {} {}", d, month, y),
        _ => format!("{} {} {}", d, month, y),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct PageOut {
    title: String,
    page_id: u64,
    namespace: i64,
    text: String,
    redirect_target: Option<String>,
}

fn person_page(lang: &str, p: &Person, world: &World) -> String {
    let bp = &world.cities[p.birthplace];
    let occ = &world.occupations[p.occupation];
    let occ_label = &occ.labels[lang];
    let date = date_surface(lang, p.birth.0, p.birth.1, p.birth.2);
    let iso = format!("{:04}-{:02}-{:02}", p.birth.0, p.birth.1, p.birth.2);
    let spouse_name = p.spouse.map(|s| world.people[s].name.clone());

    if p.oddity == Oddity::TemplateOnlyPage && lang == "fr" {
        return "{{Stub|raison=ébauche}}\n".to_string();
    }

    let mut infobox = match lang {
        "de" => format!(
            "{{{{Infobox Person|geburtsdatum={}|geburtsort=[[{}]]",
            iso, bp.name
        ),
        "fr" => format!(
            "{{{{Infobox Personne|date de naissance={}|lieu de naissance=[[{}]]",
            iso, bp.name
        ),
        _ => format!(
            "{{{{Infobox person|birth_date={}|birth_place=[[{}]]|occupation=[[{}]]",
            iso, bp.name, occ_label
        ),
    };
    if let (Some(cm), false) = (
        p.height_cm,
        matches!(p.oddity, Oddity::ApproximateHeight | Oddity::WrongUnitHeight),
    ) {
        let key = match lang {
            "de" => "größe",
            "fr" => "taille",
            _ => "height",
        };
        infobox.push_str(&format!("|{}={} cm", key, cm));
    }
    if let (Some(name), false) = (&spouse_name, p.oddity == Oddity::SpouseInSeeAlsoOnly) {
        let key = match lang {
            "de" => "ehepartner",
            "fr" => "conjoint",
            _ => "spouse",
        };
        infobox.push_str(&format!("|{}=[[{}]]", key, name));
    }
    infobox.push_str("}}");

    let lead = match lang {
        "de" => format!(
            "'''{}''' ist {} und wurde am {} in [[{}]] geboren.",
            p.name, occ_label, date, bp.name
        ),
        "fr" => format!(
            "'''{}''' est {} né le {} à [[{}]].",
            p.name, occ_label, date, bp.name
        ),
        _ => format!(
            "'''{}''' is a {} born on {} in [[{}]].",
            p.name, occ_label, date, bp.name
        ),
    };
    let mut height_sentence = String::new();
    if let Some(cm) = p.height_cm {
        let value = match p.oddity {
            Oddity::ApproximateHeight => match lang {
                "de" => format!("etwa {} cm", cm),
                "fr" => format!("environ {} cm", cm),
                _ => format!("about {} cm", cm),
            },
            _ => format!("{} cm", cm),
        };
        height_sentence = match lang {
            "de" => format!(" Die Person ist {} gro\u{00df}.", value),
            "fr" => format!(" Cette personne mesure {}.", value),
            _ => format!(" The figure stands {} tall.", value),
        };
    }

    let life_heading = match lang {
        "de" => "Leben",
        "fr" => "Biographie",
        _ => "Life",
    };
    let mut life = String::new();
    if let (Some(name), false) = (&spouse_name, p.oddity == Oddity::SpouseInSeeAlsoOnly) {
        let year = p.marriage_year.unwrap_or(p.birth.0 + 25);
        life.push_str(&match lang {
            "de" => format!("Im Jahr {} erfolgte die Heirat mit [[{}]].", year, name),
            "fr" => format!("Le mariage avec [[{}]] eut lieu en {}.", name, year),
            _ => format!("The marriage to [[{}]] took place in {}.", name, year),
        });
    }
    if let Some(child) = p.child {
        let child_name = &world.people[child].name;
        life.push_str(&match lang {
            "de" => format!(" Das Kind [[{}]] folgte wenig sp\u{00e4}ter.", child_name),
            "fr" => format!(" L'enfant [[{}]] suivit peu apr\u{00e8}s.", child_name),
            _ => format!(" The child [[{}]] followed soon after.", child_name),
        });
    }
    if let Some((y, m, d)) = p.death {
        let ds = date_surface(lang, y, m, d);
        life.push_str(&match lang {
            "de" => format!(" Der Tod kam am {}.", ds),
            "fr" => format!(" La mort survint le {}.", ds),
            _ => format!(" Death came on {}.", ds),
        });
    }
    if life.is_empty() {
        life = match lang {
            "de" => "Ein ruhiges Leben ohne besondere Ereignisse.".to_string(),
            "fr" => "Une vie calme sans grands \u{00e9}v\u{00e9}nements.".to_string(),
            _ => "A quiet life without major events.".to_string(),
        };
    }

    let see_also_heading = match lang {
        "de" => "Siehe auch",
        "fr" => "Voir aussi",
        _ => "See also",
    };
    let mut see_also = format!("* [[{}]]\n", bp.name);
    if let (Some(name), true) = (&spouse_name, p.oddity == Oddity::SpouseInSeeAlsoOnly) {
        see_also.push_str(&format!("* [[{}]]\n", name));
    }
    let refs_heading = match lang {
        "de" => "Einzelnachweise",
        "fr" => "R\u{00e9}f\u{00e9}rences",
        _ => "References",
    };

    format!(
        "{}\n{}{}\n\n== {} ==\n{}\n\n== {} ==\n{}\n== {} ==\n* Listing one.\n",
        infobox, lead, height_sentence, life_heading, life, see_also_heading, see_also, refs_heading
    )
}

fn city_page(lang: &str, c: &City, world: &World) -> String {
    let country = &world.countries[c.country];
    let coords = format!("{}, {}", c.lat, c.lon);
    let infobox = match lang {
        "de" => format!(
            "{{{{Infobox Ort|einwohner={}|staat=[[{}]]}}}}",
            c.population, country.name
        ),
        "fr" => format!(
            "{{{{Infobox Commune|population={}|pays=[[{}]]}}}}",
            c.population, country.name
        ),
        _ => format!(
            "{{{{Infobox settlement|population={}|country=[[{}]]|coordinates={}|established={}}}}}",
            c.population, country.name, coords, c.inception
        ),
    };
    let lead = match lang {
        "de" => format!(
            "'''{}''' ist eine Stadt in [[{}]] mit {} Einwohnern.",
            c.name, country.name, c.population
        ),
        "fr" => format!(
            "'''{}''' est une ville de [[{}]] avec {} habitants.",
            c.name, country.name, c.population
        ),
        _ => format!(
            "'''{}''' is a city in [[{}]] with a population of {}.",
            c.name, country.name, c.population
        ),
    };
    let geo = match lang {
        "de" => format!("Die Koordinaten lauten {}.", coords),
        "fr" => format!("Ses coordonn\u{00e9}es sont {}.", coords),
        _ => format!("It lies at {}. The town was established in {}.", coords, c.inception),
    };
    let table = format!(
        "{{|\n|-\n! year !! population\n|-\n| {} || {}\n|-\n| 2020 || {}\n|}}",
        c.inception, c.population / 2, c.population
    );
    format!("{}\n{} {}\n\n{}\n", infobox, lead, geo, table)
}

fn country_page(lang: &str, c: &Country, world: &World) -> String {
    let capital = &world.cities[c.capital];
    match lang {
        "de" => format!(
            "'''{}''' ist ein Staat. Die Hauptstadt ist [[{}]].\n",
            c.name, capital.name
        ),
        "fr" => format!(
            "'''{}''' est un pays. Sa capitale est [[{}]].\n",
            c.name, capital.name
        ),
        _ => format!(
            "'''{}''' is a country. Its capital is [[{}]].\n",
            c.name, capital.name
        ),
    }
}

fn occupation_page(lang: &str, o: &Occupation) -> String {
    let label = &o.labels[lang];
    match lang {
        "de" => format!("'''{}''' ist ein Beruf.\n", label),
        "fr" => format!("'''{}''' est un m\u{00e9}tier.\n", label),
        _ => format!("A '''{}''' practices a craft.\n", label),
    }
}

/// Generate the fixture workspace under `dir`: dumps, link tables,
/// asset files and a ready-to-run build configuration.
pub fn generate(dir: &Path, spec: &FixtureSpec) -> io::Result<FixturePaths> {
    std::fs::create_dir_all(dir)?;
    let world = build_world(spec);

    // Entity dump.
    let mut lines: Vec<String> = Vec::new();
    for (i, p) in world.people.iter().enumerate() {
        let mut cb = ClaimBuilder::new(&p.qid);
        cb.add("P31", snak_entity("P31", "Q5"), "normal", 0, None);
        if i % 16 == 3 {
            // A redundant duplicate claim: identical strict key, so the
            // two statements merge into one synset.
            cb.add("P31", snak_entity("P31", "Q5"), "preferred", 1, None);
        }
        cb.add("P21", snak_entity("P21", p.gender), "normal", 0, None);
        let birth_rank = if p.oddity == Oddity::ConflictingBirth { "preferred" } else { "normal" };
        cb.add(
            "P569",
            snak_time("P569", p.birth.0, p.birth.1, p.birth.2, 11),
            birth_rank,
            p.refs.min(2),
            None,
        );
        if p.oddity == Oddity::ConflictingBirth {
            let day = if p.birth.2 >= 28 { p.birth.2 - 1 } else { p.birth.2 + 1 };
            cb.add("P569", snak_time("P569", p.birth.0, p.birth.1, day, 11), "normal", 0, None);
        }
        cb.add("P19", snak_entity("P19", &world.cities[p.birthplace].qid), "normal", p.refs, None);
        if p.oddity == Oddity::DeprecatedBirthplace {
            let other = (p.birthplace + 1) % world.cities.len();
            cb.add("P19", snak_entity("P19", &world.cities[other].qid), "deprecated", 0, None);
        }
        cb.add("P106", snak_entity("P106", &world.occupations[p.occupation].qid), "normal", 0, None);
        if let Some(s) = p.spouse {
            let quals = p.marriage_year.map(|y| {
                Value::map([("P580", Value::Arr(vec![snak_time("P580", y, 0, 0, 9)]))])
            });
            cb.add("P26", snak_entity("P26", &world.people[s].qid), "normal", p.refs.min(1), quals);
        }
        if let Some(c) = p.child {
            cb.add("P40", snak_entity("P40", &world.people[c].qid), "normal", 0, None);
        }
        if let Some(cm) = p.height_cm {
            let (amount, unit) = match p.oddity {
                Oddity::WrongUnitHeight => (cm.to_string(), "Q11570"),
                _ => (cm.to_string(), "Q174728"),
            };
            cb.add("P2048", snak_quantity("P2048", &amount, unit), "normal", 0, None);
        }
        if let Some((y, m, d)) = p.death {
            cb.add("P570", snak_time("P570", y, m, d, 11), "normal", 0, None);
        }
        lines.push(entity_json(&p.qid, &same_labels(&p.name), &p.sitelinks, cb.claims));
        // One corrupt line exercises the skip contract.
        if i == 17 {
            lines.push("### deliberately not JSON ###".to_string());
        }
    }
    for c in &world.cities {
        let mut cb = ClaimBuilder::new(&c.qid);
        cb.add("P31", snak_entity("P31", "Q515"), "normal", 0, None);
        cb.add("P17", snak_entity("P17", &world.countries[c.country].qid), "normal", 1, None);
        cb.add("P625", snak_coordinate("P625", &c.lat, &c.lon), "normal", 0, None);
        cb.add("P1082", snak_quantity("P1082", &c.population.to_string(), "1"), "normal", 1, None);
        cb.add("P571", snak_time("P571", c.inception, 0, 0, 9), "normal", 0, None);
        lines.push(entity_json(&c.qid, &same_labels(&c.name), &c.sitelinks, cb.claims));
    }
    for c in &world.countries {
        let mut cb = ClaimBuilder::new(&c.qid);
        cb.add("P31", snak_entity("P31", "Q6256"), "normal", 0, None);
        cb.add("P36", snak_entity("P36", &world.cities[c.capital].qid), "normal", 1, None);
        lines.push(entity_json(&c.qid, &same_labels(&c.name), &c.sitelinks, cb.claims));
    }
    for o in &world.occupations {
        let mut cb = ClaimBuilder::new(&o.qid);
        cb.add("P31", snak_entity("P31", "Q28640"), "normal", 0, None);
        lines.push(entity_json(&o.qid, &o.labels, &o.sitelinks, cb.claims));
    }
    // Class and property items carry labels only.
    let class_labels: &[(&str, &str, &str, &str)] = &[
        ("Q5", "human", "Mensch", "humain"),
        ("Q515", "city", "Stadt", "ville"),
        ("Q6256", "country", "Staat", "pays"),
        ("Q28640", "profession", "Beruf", "m\u{00e9}tier"),
        ("Q6581097", "male", "m\u{00e4}nnlich", "masculin"),
        ("Q6581072", "female", "weiblich", "f\u{00e9}minin"),
        ("P31", "instance of", "ist ein", "nature de"),
        ("P21", "gender", "Geschlecht", "genre"),
        ("P19", "place of birth", "Geburtsort", "lieu de naissance"),
        ("P569", "date of birth", "Geburtsdatum", "date de naissance"),
        ("P570", "date of death", "Sterbedatum", "date de d\u{00e9}c\u{00e8}s"),
        ("P26", "spouse", "Ehepartner", "conjoint"),
        ("P40", "child", "Kind", "enfant"),
        ("P106", "occupation", "T\u{00e4}tigkeit", "occupation"),
        ("P2048", "height", "K\u{00f6}rpergr\u{00f6}\u{00df}e", "taille"),
        ("P1082", "population", "Einwohnerzahl", "population"),
        ("P17", "country", "Staat", "pays"),
        ("P36", "capital", "Hauptstadt", "capitale"),
        ("P625", "coordinates", "Koordinaten", "coordonn\u{00e9}es"),
        ("P571", "inception", "Gr\u{00fc}ndung", "cr\u{00e9}ation"),
    ];
    for (id, en, de, fr) in class_labels {
        let labels: BTreeMap<String, String> = [
            ("en".to_string(), en.to_string()),
            ("de".to_string(), de.to_string()),
            ("fr".to_string(), fr.to_string()),
        ]
        .into();
        lines.push(entity_json(id, &labels, &BTreeMap::new(), BTreeMap::new()));
    }
    let entities_path = dir.join("entities.json");
    std::fs::write(&entities_path, lines.join("\n") + "\n")?;

    // Page dumps plus link tables per language.
    let mut page_paths = BTreeMap::new();
    for lang in LANGS {
        let mut pages: Vec<PageOut> = Vec::new();
        let mut next_id: u64 = 1;
        fn add(
            pages: &mut Vec<PageOut>,
            next_id: &mut u64,
            title: String,
            ns: i64,
            text: String,
            redirect: Option<String>,
        ) {
            pages.push(PageOut {
                title,
                page_id: *next_id,
                namespace: ns,
                text,
                redirect_target: redirect,
            });
            *next_id += 1;
        }
        let mut redirects: Vec<(String, String)> = Vec::new();
        let mut disambig_ids: Vec<u64> = Vec::new();

        for p in &world.people {
            if !p.sitelinks.contains_key(*lang) {
                continue;
            }
            match (p.oddity, *lang) {
                (Oddity::RedirectSitelink, "en") => {
                    // Redirect page plus table row, then the real page.
                    let old = format!("{} (old)", p.name);
                    add(
                        &mut pages,
                        &mut next_id,
                        old.clone(),
                        0,
                        format!("#REDIRECT [[{}]]\n", p.name),
                        Some(p.name.clone()),
                    );
                    redirects.push((old, p.name.clone()));
                    add(&mut pages, &mut next_id, p.name.clone(), 0, person_page(lang, p, &world), None);
                }
                (Oddity::DisambigSitelink, "de") => {
                    let id_here = next_id;
                    add(
                        &mut pages,
                        &mut next_id,
                        p.name.clone(),
                        0,
                        format!("'''{}''' steht f\u{00fc}r mehrere Personen.\n", p.name),
                        None,
                    );
                    disambig_ids.push(id_here);
                }
                _ => {
                    add(&mut pages, &mut next_id, p.name.clone(), 0, person_page(lang, p, &world), None);
                }
            }
        }
        for c in &world.cities {
            add(&mut pages, &mut next_id, c.name.clone(), 0, city_page(lang, c, &world), None);
        }
        for c in &world.countries {
            add(&mut pages, &mut next_id, c.name.clone(), 0, country_page(lang, c, &world), None);
        }
        for o in &world.occupations {
            add(&mut pages, &mut next_id, o.labels[*lang].clone(), 0, occupation_page(lang, o), None);
        }
        // One template page per language, retained with its namespace.
        add(
            &mut pages,
            &mut next_id,
            "Template:Infobox person".to_string(),
            10,
            "Template documentation.".to_string(),
            None,
        );

        let mut xml = String::from("<mediawiki>\n");
        for p in &pages {
            xml.push_str("<page>\n");
            xml.push_str(&format!("<title>{}</title>\n", xml_escape(&p.title)));
            xml.push_str(&format!("<ns>{}</ns>\n", p.namespace));
            xml.push_str(&format!("<id>{}</id>\n", p.page_id));
            if let Some(target) = &p.redirect_target {
                xml.push_str(&format!("<redirect title=\"{}\"/>\n", xml_escape(target)));
            }
            xml.push_str(&format!(
                "<revision><id>{}</id><timestamp>2025-11-01T00:00:00Z</timestamp><text>{}</text></revision>\n",
                p.page_id + 10_000,
                xml_escape(&p.text)
            ));
            xml.push_str("</page>\n");
        }
        xml.push_str("</mediawiki>\n");
        let pages_path = dir.join(format!("pages-{}.xml", lang));
        std::fs::write(&pages_path, xml)?;
        page_paths.insert(lang.to_string(), pages_path);

        let redirect_lines: String =
            redirects.iter().map(|(a, b)| format!("{}\t{}\n", a, b)).collect();
        std::fs::write(dir.join(format!("redirects-{}.tsv", lang)), redirect_lines)?;
        let disambig_lines: String =
            disambig_ids.iter().map(|id| format!("{}\n", id)).collect();
        std::fs::write(dir.join(format!("disambig-{}.tsv", lang)), disambig_lines)?;
    }

    // Asset files rendered canonically.
    std::fs::write(
        dir.join("policy.json"),
        canon_string(&defaults::default_policy().to_canon()) + "\n",
    )?;
    std::fs::write(
        dir.join("policy-relaxed.json"),
        canon_string(&defaults::relaxed_policy().to_canon()) + "\n",
    )?;
    std::fs::create_dir_all(dir.join("packs"))?;
    for lang in ["en", "de", "fr", "zh"] {
        let pack = defaults::language_pack(lang).expect("shipped pack");
        std::fs::write(
            dir.join("packs").join(format!("{}.json", lang)),
            canon_string(&pack.to_canon()) + "\n",
        )?;
    }
    std::fs::write(dir.join("schema_map.tsv"), defaults::schema_map_tsv())?;
    std::fs::write(
        dir.join("relation_map.json"),
        canon_string(&defaults::relation_map().to_canon()) + "\n",
    )?;

    // Build configuration pointing at everything above.
    let languages: Vec<Value> = LANGS
        .iter()
        .map(|lang| {
            Value::map([
                ("language", Value::str(*lang)),
                ("pages", Value::str(format!("pages-{}.xml", lang))),
                ("redirects", Value::str(format!("redirects-{}.tsv", lang))),
                ("disambiguations", Value::str(format!("disambig-{}.tsv", lang))),
                ("pack", Value::str(format!("packs/{}.json", lang))),
            ])
        })
        .collect();
    let config = Value::map([
        ("snapshot_date", Value::str("2025-11-01")),
        ("entities", Value::str("entities.json")),
        ("languages", Value::Arr(languages)),
        ("policy", Value::str("policy.json")),
        ("schema_map", Value::str("schema_map.tsv")),
        ("relation_map", Value::str("relation_map.json")),
        ("out", Value::str("out")),
        ("title_fallback", Value::Bool(false)),
        ("hop_cap", Value::int(2)),
        ("mfc_total", Value::int(600)),
    ]);
    let config_path = dir.join("build.json");
    std::fs::write(&config_path, canon_string(&config) + "\n")?;

    Ok(FixturePaths { root: dir.to_path_buf(), config: config_path, entities: entities_path, pages: page_paths })
}

/// Engineered near-duplicate statements for merge-discipline tests:
/// `count` base statements, each shadowed by an off-by-one date, a unit
/// variant or an alias-string variant.
pub fn near_duplicate_statements(count: usize) -> Vec<FactStatement> {
    let mut out = Vec::new();
    let mut rng = SplitMix64::new(0xD0_0D1E);
    for i in 0..count {
        let subject = EntityId::new(format!("Q{}", 9000 + i)).unwrap();
        let kind = i % 3;
        let (property, base, variant) = match kind {
            0 => {
                let day = 1 + (rng.below(27) as u8);
                (
                    PropertyId::new("P569").unwrap(),
                    TypedValue::Time(factforge_core::model::TimeValue::ymd(
                        1950 + (i % 50) as i64,
                        6,
                        day,
                        factforge_core::model::TimePrecision::Day,
                    )),
                    TypedValue::Time(factforge_core::model::TimeValue::ymd(
                        1950 + (i % 50) as i64,
                        6,
                        day + 1,
                        factforge_core::model::TimePrecision::Day,
                    )),
                )
            }
            1 => {
                let cm = 150 + (i % 50) as i64;
                (
                    PropertyId::new("P2048").unwrap(),
                    TypedValue::Quantity(factforge_core::model::QuantityValue {
                        amount: Decimal::from_i64(cm),
                        unit: "Q174728".to_string(),
                    }),
                    TypedValue::Quantity(factforge_core::model::QuantityValue {
                        amount: Decimal::from_i64(cm).mul(&Decimal::parse("0.01").unwrap()),
                        unit: "Q11573".to_string(),
                    }),
                )
            }
            _ => (
                PropertyId::new("P1448").unwrap(),
                TypedValue::Str { text: format!("Name {}", i), language: None },
                TypedValue::Str { text: format!("  Name {} ", i), language: None },
            ),
        };
        for (suffix, value) in [("a", base), ("b", variant)] {
            out.push(FactStatement {
                statement_id: format!("{}$dup-{}", subject, suffix),
                subject: subject.clone(),
                property: property.clone(),
                value,
                qualifiers: vec![],
                rank: Rank::Normal,
                references: vec![],
                last_edit: "2025-11-01T00:00:00Z".to_string(),
                sitelinks: BTreeMap::new(),
                confidence: statement_confidence(Rank::Normal, 0),
                claim_hash: String::new(),
                synthetic_id: false,
            });
        }
    }
    out
}
