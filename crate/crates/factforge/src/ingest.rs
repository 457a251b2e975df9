//! Streaming readers for snapshot inputs: the entity JSON dump, the
//! pages-articles XML dumps, and the redirect/disambiguation link
//! tables. Readers are single-pass; malformed records are counted and
//! skipped with a locator, never silently repaired.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use factforge_core::canon::{self, Value};
use factforge_core::model::{LinkTables, RawEntityRecord, RawPage};
use quick_xml::events::Event;
use quick_xml::Reader as XmlReader;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing input: {0}")]
    MissingInput(PathBuf),
    #[error("stream corrupt at byte {offset}: {message}")]
    StreamCorrupt { offset: u64, message: String },
    #[error("xml malformed at element {path} (byte {offset}): {message}")]
    XmlMalformed { path: String, offset: u64, message: String },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Open a dump file, auto-detecting gzip and bzip2 by magic bytes.
pub fn open_dump(path: &Path) -> Result<Box<dyn BufRead>, IngestError> {
    let mut file = File::open(path).map_err(|_| IngestError::MissingInput(path.to_path_buf()))?;
    let mut magic = [0u8; 3];
    let n = file
        .read(&mut magic)
        .map_err(|e| IngestError::Io { path: path.to_path_buf(), source: e })?;
    // Reopen from the start; the magic probe consumed the header.
    let file = File::open(path).map_err(|_| IngestError::MissingInput(path.to_path_buf()))?;
    let reader: Box<dyn BufRead> = if n >= 2 && magic[0] == 0x1f && magic[1] == 0x8b {
        Box::new(BufReader::new(flate2::read::GzDecoder::new(file)))
    } else if n >= 3 && &magic[..3] == b"BZh" {
        Box::new(BufReader::new(bzip2::read::BzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    Ok(reader)
}

/// A record skipped during ingestion, with its locator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkipReport {
    pub input: String,
    pub line: u64,
    pub reason: String,
}

impl SkipReport {
    pub fn to_canon(&self) -> Value {
        Value::map([
            ("event", Value::str("skip")),
            ("input", Value::str(self.input.clone())),
            ("line", Value::int(self.line as i64)),
            ("reason", Value::str(self.reason.clone())),
        ])
    }
}

/// One event from the entity dump stream.
#[derive(Debug)]
pub enum EntityEvent {
    Record(RawEntityRecord),
    Skipped(SkipReport),
}

/// Streaming reader over a line- or array-delimited entity dump.
pub struct EntityDumpReader<R: BufRead> {
    reader: R,
    input: String,
    line: u64,
    byte_offset: u64,
    done: bool,
}

impl<R: BufRead> EntityDumpReader<R> {
    pub fn new(reader: R, input_name: &str) -> Self {
        EntityDumpReader {
            reader,
            input: input_name.to_string(),
            line: 0,
            byte_offset: 0,
            done: false,
        }
    }
}

/// Read every well-formed entity exactly once, in file order.
pub fn read_entity_dump<R: BufRead>(reader: R, input_name: &str) -> EntityDumpReader<R> {
    EntityDumpReader::new(reader, input_name)
}

impl<R: BufRead> Iterator for EntityDumpReader<R> {
    type Item = Result<EntityEvent, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let mut buf = String::new();
            match self.reader.read_line(&mut buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(n) => {
                    self.byte_offset += n as u64;
                    self.line += 1;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(IngestError::StreamCorrupt {
                        offset: self.byte_offset,
                        message: e.to_string(),
                    }));
                }
            }
            let trimmed = buf.trim();
            // Array-delimited dumps wrap records in brackets and trail
            // commas; both framings share the per-line record layout.
            let trimmed = trimmed.strip_suffix(',').unwrap_or(trimmed);
            if trimmed.is_empty() || trimmed == "[" || trimmed == "]" {
                continue;
            }
            match canon::parse(trimmed) {
                Ok(value) => match entity_from_value(&value) {
                    Ok(record) => return Some(Ok(EntityEvent::Record(record))),
                    Err(reason) => {
                        return Some(Ok(EntityEvent::Skipped(SkipReport {
                            input: self.input.clone(),
                            line: self.line,
                            reason,
                        })))
                    }
                },
                Err(e) => {
                    return Some(Ok(EntityEvent::Skipped(SkipReport {
                        input: self.input.clone(),
                        line: self.line,
                        reason: format!("not valid JSON: {}", e),
                    })))
                }
            }
        }
    }
}

/// Site key to language code: the standard `<lang>wiki` keys map to
/// `<lang>`; anything else passes through verbatim.
fn site_to_language(site: &str) -> String {
    site.strip_suffix("wiki").unwrap_or(site).to_string()
}

fn entity_from_value(v: &Value) -> Result<RawEntityRecord, String> {
    let id = v.get("id").and_then(Value::as_str).ok_or("missing id")?;
    let mut record = RawEntityRecord {
        entity_id: id.to_string(),
        last_modified: v
            .get("modified")
            .and_then(Value::as_str)
            .unwrap_or("")
            .to_string(),
        ..Default::default()
    };
    if let Some(Value::Map(labels)) = v.get("labels") {
        for (lang, entry) in labels {
            if let Some(text) = entry.get("value").and_then(Value::as_str) {
                record.labels.insert(lang.clone(), text.to_string());
            }
        }
    }
    if let Some(Value::Map(aliases)) = v.get("aliases") {
        for (lang, list) in aliases {
            let values: Vec<String> = list
                .as_arr()
                .map(|a| {
                    a.iter()
                        .filter_map(|e| e.get("value").and_then(Value::as_str))
                        .map(str::to_string)
                        .collect()
                })
                .unwrap_or_default();
            if !values.is_empty() {
                record.aliases.insert(lang.clone(), values);
            }
        }
    }
    if let Some(Value::Map(claims)) = v.get("claims") {
        for (pid, list) in claims {
            let claims: Vec<Value> =
                list.as_arr().ok_or("claims entry not a list")?.to_vec();
            record.claims.insert(pid.clone(), claims);
        }
    }
    if let Some(Value::Map(sitelinks)) = v.get("sitelinks") {
        for (site, entry) in sitelinks {
            if let Some(title) = entry.get("title").and_then(Value::as_str) {
                record.sitelinks.insert(site_to_language(site), title.to_string());
            }
        }
    }
    Ok(record)
}

/// Read a pages-articles XML export: latest-revision pages with the
/// redirect flag and target; wikitext preserved byte-exact.
pub fn read_page_dump<R: BufRead>(reader: R, input_name: &str) -> Result<Vec<RawPage>, IngestError> {
    let mut xml = XmlReader::from_reader(reader);
    xml.config_mut().trim_text(false);
    let mut pages = Vec::new();
    let mut buf = Vec::new();

    #[derive(Default)]
    struct PageBuild {
        title: String,
        namespace: i64,
        page_id: Option<u64>,
        revision_id: Option<u64>,
        text: String,
        is_redirect: bool,
        redirect_target: Option<String>,
        in_revision: bool,
    }

    let mut current: Option<PageBuild> = None;
    let mut path: Vec<String> = Vec::new();

    let xml_err = |xml: &XmlReader<R>, path: &[String], message: String| IngestError::XmlMalformed {
        path: path.join("/"),
        offset: xml.buffer_position(),
        message,
    };

    loop {
        match xml.read_event_into(&mut buf) {
            Ok(Event::Start(e)) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).to_string();
                path.push(name.clone());
                match name.as_str() {
                    "page" => current = Some(PageBuild::default()),
                    "revision" => {
                        if let Some(p) = current.as_mut() {
                            p.in_revision = true;
                            // Multi-revision exports keep only the last
                            // (latest) revision.
                            p.text.clear();
                            p.revision_id = None;
                        }
                    }
                    _ => {}
                }
            }
            Ok(Event::Empty(e)) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).to_string();
                if name == "redirect" {
                    if let Some(p) = current.as_mut() {
                        p.is_redirect = true;
                        for attr in e.attributes().flatten() {
                            if attr.key.as_ref() == b"title" {
                                p.redirect_target = Some(
                                    String::from_utf8_lossy(&attr.value).to_string(),
                                );
                            }
                        }
                    }
                }
            }
            Ok(Event::Text(t)) => {
                let Some(p) = current.as_mut() else { continue };
                let text = t
                    .unescape()
                    .map_err(|e| xml_err(&xml, &path, e.to_string()))?
                    .to_string();
                match path.last().map(String::as_str) {
                    Some("title") => p.title.push_str(&text),
                    Some("ns") => {
                        p.namespace = text.trim().parse().map_err(|_| {
                            xml_err(&xml, &path, format!("bad namespace '{}'", text.trim()))
                        })?;
                    }
                    Some("id") => {
                        let id: u64 = text.trim().parse().map_err(|_| {
                            xml_err(&xml, &path, format!("bad id '{}'", text.trim()))
                        })?;
                        if p.in_revision {
                            if p.revision_id.is_none() {
                                p.revision_id = Some(id);
                            }
                        } else if p.page_id.is_none() {
                            p.page_id = Some(id);
                        }
                    }
                    Some("text") => p.text.push_str(&text),
                    _ => {}
                }
            }
            Ok(Event::End(e)) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).to_string();
                path.pop();
                match name.as_str() {
                    "revision" => {
                        if let Some(p) = current.as_mut() {
                            p.in_revision = false;
                        }
                    }
                    "page" => {
                        let p = current.take().ok_or_else(|| {
                            xml_err(&xml, &path, "page close without open".to_string())
                        })?;
                        let page_id = p
                            .page_id
                            .ok_or_else(|| xml_err(&xml, &path, "page without id".to_string()))?;
                        let revision_id = p.revision_id.ok_or_else(|| {
                            xml_err(&xml, &path, "page without revision id".to_string())
                        })?;
                        pages.push(RawPage {
                            page_id,
                            revision_id,
                            title: p.title,
                            namespace: p.namespace,
                            wikitext: p.text,
                            is_redirect: p.is_redirect,
                            redirect_target: p.redirect_target,
                        });
                    }
                    _ => {}
                }
            }
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => {
                return Err(IngestError::XmlMalformed {
                    path: path.join("/"),
                    offset: xml.buffer_position(),
                    message: e.to_string(),
                })
            }
        }
        buf.clear();
    }
    let _ = input_name;
    Ok(pages)
}

/// Read the redirect table (`title<TAB>target` per line) and the
/// disambiguation list (one page id per line).
pub fn read_link_tables(
    redirects: Option<&Path>,
    disambiguations: Option<&Path>,
) -> Result<LinkTables, IngestError> {
    let mut tables = LinkTables::default();
    if let Some(path) = redirects {
        let reader = open_dump(path)?;
        for line in reader.lines() {
            let line = line.map_err(|e| IngestError::Io { path: path.to_path_buf(), source: e })?;
            let line = line.trim_end_matches('\n');
            if line.is_empty() {
                continue;
            }
            if let Some((title, target)) = line.split_once('\t') {
                tables.redirects.insert(title.to_string(), target.to_string());
            }
        }
    }
    if let Some(path) = disambiguations {
        let reader = open_dump(path)?;
        for line in reader.lines() {
            let line = line.map_err(|e| IngestError::Io { path: path.to_path_buf(), source: e })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Ok(id) = trimmed.parse::<u64>() {
                tables.disambiguation_pages.insert(id);
            }
        }
    }
    Ok(tables)
}

/// Collect an entity dump into records plus skip reports. The streaming
/// iterator stays available for callers that need constant memory; the
/// fixture-scale pipeline collects.
pub fn collect_entities(
    path: &Path,
) -> Result<(Vec<RawEntityRecord>, Vec<SkipReport>), IngestError> {
    let reader = open_dump(path)?;
    let name = path.file_name().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for event in read_entity_dump(reader, &name) {
        match event? {
            EntityEvent::Record(r) => records.push(r),
            EntityEvent::Skipped(s) => skipped.push(s),
        }
    }
    Ok((records, skipped))
}

/// Load one language's pages into a title-keyed map.
pub fn collect_pages(path: &Path) -> Result<Vec<RawPage>, IngestError> {
    let reader = open_dump(path)?;
    let name = path.file_name().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
    read_page_dump(reader, &name)
}

/// Convenience: pages keyed by title.
pub fn pages_by_title(pages: Vec<RawPage>) -> BTreeMap<String, RawPage> {
    pages.into_iter().map(|p| (p.title.clone(), p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    const ENTITY_LINE: &str = r#"{"id":"Q1","type":"item","modified":"2025-11-01T00:00:00Z","labels":{"en":{"language":"en","value":"Alice"}},"claims":{"P31":[{"id":"Q1$a","mainsnak":{"snaktype":"value","property":"P31","datatype":"wikibase-item","datavalue":{"type":"wikibase-entityid","value":{"id":"Q5"}}},"rank":"normal"}]},"sitelinks":{"enwiki":{"site":"enwiki","title":"Alice"}}}"#;

    #[test]
    fn entity_dump_round_trip() {
        let dump = format!("{}\n{}\n{}\n", ENTITY_LINE, ENTITY_LINE.replace("Q1", "Q2"), ENTITY_LINE.replace("Q1", "Q3"));
        let events: Vec<_> = read_entity_dump(Cursor::new(dump), "t").collect();
        assert_eq!(events.len(), 3);
        let mut ids = Vec::new();
        for e in events {
            match e.unwrap() {
                EntityEvent::Record(r) => {
                    assert_eq!(r.sitelinks.get("en").map(String::as_str), Some("Alice"));
                    ids.push(r.entity_id);
                }
                EntityEvent::Skipped(s) => panic!("unexpected skip: {:?}", s),
            }
        }
        assert_eq!(ids, vec!["Q1", "Q2", "Q3"]);
    }

    #[test]
    fn malformed_line_is_skipped_with_locator() {
        let dump = format!("{}\nthis is not json\n{}\n", ENTITY_LINE, ENTITY_LINE.replace("Q1", "Q2"));
        let events: Vec<_> = read_entity_dump(Cursor::new(dump), "t").map(Result::unwrap).collect();
        assert_eq!(events.len(), 3);
        match &events[1] {
            EntityEvent::Skipped(s) => {
                assert_eq!(s.line, 2);
                assert!(s.reason.contains("JSON"));
            }
            _ => panic!("expected skip"),
        }
    }

    #[test]
    fn empty_stream_is_empty() {
        let events: Vec<_> = read_entity_dump(Cursor::new(String::new()), "t").collect();
        assert!(events.is_empty());
    }

    #[test]
    fn array_delimited_dump_parses() {
        let dump = format!("[\n{},\n{}\n]\n", ENTITY_LINE, ENTITY_LINE.replace("Q1", "Q2"));
        let events: Vec<_> = read_entity_dump(Cursor::new(dump), "t").map(Result::unwrap).collect();
        assert_eq!(events.len(), 2);
    }

    fn page_xml(extra: &str) -> String {
        format!(
            "<mediawiki>\n<page>\n<title>Alpha</title>\n<ns>0</ns>\n<id>1</id>\n<revision><id>11</id><timestamp>2025-11-01T00:00:00Z</timestamp><text>Alpha text with [[link]].</text></revision>\n</page>\n<page>\n<title>Beta</title>\n<ns>0</ns>\n<id>2</id>\n<revision><id>22</id><text>Beta body.</text></revision>\n</page>\n{}\n</mediawiki>\n",
            extra
        )
    }

    #[test]
    fn page_dump_fields_and_redirects() {
        let redirect = "<page>\n<title>Gamma</title>\n<ns>0</ns>\n<id>3</id>\n<redirect title=\"Alpha\"/>\n<revision><id>33</id><text>#REDIRECT [[Alpha]]</text></revision>\n</page>";
        let pages = read_page_dump(Cursor::new(page_xml(redirect)), "t").unwrap();
        assert_eq!(pages.len(), 3);
        assert_eq!(pages[0].title, "Alpha");
        assert_eq!(pages[0].page_id, 1);
        assert_eq!(pages[0].revision_id, 11);
        assert!(!pages[0].is_redirect);
        assert!(pages[2].is_redirect);
        assert_eq!(pages[2].redirect_target.as_deref(), Some("Alpha"));
    }

    #[test]
    fn template_namespace_is_retained_with_namespace_recorded() {
        let tpl = "<page>\n<title>Template:Infobox person</title>\n<ns>10</ns>\n<id>9</id>\n<revision><id>99</id><text>{{doc}}</text></revision>\n</page>";
        let pages = read_page_dump(Cursor::new(page_xml(tpl)), "t").unwrap();
        let t = pages.iter().find(|p| p.namespace == 10).unwrap();
        assert_eq!(t.title, "Template:Infobox person");
    }

    #[test]
    fn wikitext_preserved_through_xml_escaping() {
        // "]]" inside nowiki plus XML-escaped angle brackets.
        let raw_text = "Keep <nowiki>]]</nowiki> &amp; more";
        let xml_page = format!(
            "<mediawiki><page><title>X</title><ns>0</ns><id>5</id><revision><id>55</id><text>Keep &lt;nowiki&gt;]]&lt;/nowiki&gt; &amp;amp; more</text></revision></page></mediawiki>"
        );
        let pages = read_page_dump(Cursor::new(xml_page), "t").unwrap();
        assert_eq!(pages[0].wikitext, raw_text);
    }

    #[test]
    fn malformed_xml_reports_position() {
        let bad = "<mediawiki><page><title>X</title><ns>zero</ns><id>5</id><revision><id>55</id><text>t</text></revision></page></mediawiki>";
        let err = read_page_dump(Cursor::new(bad), "t").unwrap_err();
        match err {
            IngestError::XmlMalformed { message, .. } => assert!(message.contains("namespace")),
            other => panic!("unexpected error {:?}", other),
        }
    }

    #[test]
    fn link_tables_parse() {
        let dir = tempfile::tempdir().unwrap();
        let rd = dir.path().join("redirects.tsv");
        let dd = dir.path().join("disambig.tsv");
        std::fs::write(&rd, "Old title\tNew title\nA\tB\n").unwrap();
        std::fs::write(&dd, "42\n77\n").unwrap();
        let tables = read_link_tables(Some(&rd), Some(&dd)).unwrap();
        assert_eq!(tables.redirects.get("Old title").map(String::as_str), Some("New title"));
        assert!(tables.disambiguation_pages.contains(&42));
        assert_eq!(tables.disambiguation_pages.len(), 2);
    }

    #[test]
    fn gzip_autodetection() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let gz = dir.path().join("dump.json.gz");
        let mut enc = GzEncoder::new(File::create(&gz).unwrap(), Compression::default());
        enc.write_all(ENTITY_LINE.as_bytes()).unwrap();
        enc.write_all(b"\n").unwrap();
        enc.finish().unwrap();
        let (records, skipped) = collect_entities(&gz).unwrap();
        assert_eq!(records.len(), 1);
        assert!(skipped.is_empty());
    }

    #[test]
    fn missing_input_is_a_named_error() {
        let err = collect_entities(Path::new("/nonexistent/dump.json")).unwrap_err();
        assert!(matches!(err, IngestError::MissingInput(_)));
    }

    #[test]
    fn rereads_are_bit_identical() {
        let dump = format!("{}\n", ENTITY_LINE);
        let first: Vec<_> = read_entity_dump(Cursor::new(dump.clone()), "t")
            .map(Result::unwrap)
            .filter_map(|e| match e {
                EntityEvent::Record(r) => Some(r),
                _ => None,
            })
            .collect();
        let second: Vec<_> = read_entity_dump(Cursor::new(dump), "t")
            .map(Result::unwrap)
            .filter_map(|e| match e {
                EntityEvent::Record(r) => Some(r),
                _ => None,
            })
            .collect();
        // Bit-compare through the canonical record form.
        let canon_of = |r: &RawEntityRecord| {
            let claims: Vec<Value> = r.claims.values().flatten().cloned().collect();
            canon::canon_serialize(&Value::map([
                ("id", Value::str(r.entity_id.clone())),
                ("claims", Value::Arr(claims)),
            ]))
        };
        assert_eq!(canon_of(&first[0]), canon_of(&second[0]));
    }
}
