use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::session::Session;

/// One JSON file per session under `<data_dir>/sessions/`.
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(data_dir: &Path) -> io::Result<Self> {
        let dir = data_dir.join("sessions");
        std::fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir })
    }

    pub fn path_of(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Writes to a temp file in the same directory, then renames over the
    /// target so readers never see a partial document.
    pub fn save(&self, session: &Session) -> io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, session).map_err(io::Error::other)?;
        tmp.write_all(b"\n")?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_of(&session.id)).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn load_all(&self) -> io::Result<Vec<Session>> {
        let mut out = Vec::new();
        for entry in std::fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let session: Session = serde_json::from_str(&text)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            out.push(session);
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }
}
