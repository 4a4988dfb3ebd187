use std::io::{Read, Write};
use std::path::Path;

use super::{Corpus, CorpusData};
use crate::error::Result;
use crate::persist;

const MAGIC: &[u8; 8] = b"ECCORPUS";
pub const SNAPSHOT_VERSION: u32 = 1;

impl Corpus {
    pub fn write_snapshot(&self, w: impl Write) -> Result<()> {
        persist::write_blob(w, MAGIC, SNAPSHOT_VERSION, &self.data)
    }

    pub fn read_snapshot(r: impl Read) -> Result<Corpus> {
        let data: CorpusData = persist::read_blob(r, MAGIC, SNAPSHOT_VERSION)?;
        Ok(Corpus::from_data(data))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MAGIC, SNAPSHOT_VERSION, &self.data)
    }

    pub fn load(path: &Path) -> Result<Corpus> {
        let data: CorpusData = persist::load(path, MAGIC, SNAPSHOT_VERSION)?;
        Ok(Corpus::from_data(data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IngestOptions, PaperRecord};
    use crate::error::Error;

    #[test]
    fn snapshot_round_trip_preserves_stats() {
        let papers = vec![
            PaperRecord {
                id: "a".into(),
                title: "t".into(),
                abstract_text: "x".into(),
                authors: vec!["u".into()],
                venue: "v".into(),
                year: 2001,
                references: vec![],
            },
            PaperRecord {
                id: "b".into(),
                title: "t".into(),
                abstract_text: "x".into(),
                authors: vec!["w".into(), "u".into()],
                venue: "v".into(),
                year: 2002,
                references: vec!["a".into(), "missing".into()],
            },
        ];
        let c = Corpus::from_records(papers, vec![], vec![], vec![], &IngestOptions::default())
            .unwrap()
            .filter(2)
            .unwrap();
        let mut buf = Vec::new();
        c.write_snapshot(&mut buf).unwrap();
        let back = Corpus::read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.stats(), c.stats());
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_foreign_header() {
        let err = Corpus::read_snapshot(&b"NOTACORPUS\x01\x00"[..]).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        let mut buf = Vec::new();
        Corpus::empty().write_snapshot(&mut buf).unwrap();
        buf[8] = 99;
        assert!(matches!(Corpus::read_snapshot(buf.as_slice()), Err(Error::Format(_))));
    }
}
