//! Dense integer ids for tracks, artists, albums and playlists, plus the
//! bidirectional URI interning table they are assigned from.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! dense_id {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

dense_id!(TrackId, "t");
dense_id!(ArtistId, "a");
dense_id!(AlbumId, "b");
dense_id!(PlaylistId, "p");

/// Bijection between original URI strings and contiguous indices from 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    by_uri: HashMap<String, u32>,
    uris: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a URI, returning its dense index and whether it was freshly
    /// assigned (true the first time a URI is seen).
    pub fn intern(&mut self, uri: &str) -> (u32, bool) {
        if let Some(&id) = self.by_uri.get(uri) {
            return (id, false);
        }
        let id = self.uris.len() as u32;
        self.by_uri.insert(uri.to_owned(), id);
        self.uris.push(uri.to_owned());
        (id, true)
    }

    pub fn get(&self, uri: &str) -> Option<u32> {
        self.by_uri.get(uri).copied()
    }

    pub fn uri(&self, id: u32) -> &str {
        &self.uris[id as usize]
    }

    pub fn len(&self) -> usize {
        self.uris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uris.is_empty()
    }

    pub fn uris(&self) -> &[String] {
        &self.uris
    }

    /// Rebuild from a dense URI list (used when loading snapshots). Fails on
    /// a duplicate URI, returning the offending string.
    pub fn from_uris(uris: Vec<String>) -> Result<Self, String> {
        let mut by_uri = HashMap::with_capacity(uris.len());
        for (i, u) in uris.iter().enumerate() {
            if by_uri.insert(u.clone(), i as u32).is_some() {
                return Err(u.clone());
            }
        }
        Ok(Self { by_uri, uris })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_a_bijection() {
        let mut it = Interner::new();
        let (a, a_new) = it.intern("spotify:track:a");
        let (b, b_new) = it.intern("spotify:track:b");
        let (a2, a2_new) = it.intern("spotify:track:a");
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert!(a_new && b_new && !a2_new);
        assert_eq!(it.uri(a), "spotify:track:a");
        assert_eq!(it.len(), 2);
        // indices contiguous from 0
        assert_eq!(a, 0);
        assert_eq!(b, 1);
    }

    #[test]
    fn from_uris_rejects_duplicates() {
        let ok = Interner::from_uris(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(ok.get("y"), Some(1));
        let err = Interner::from_uris(vec!["x".into(), "x".into()]).unwrap_err();
        assert_eq!(err, "x");
    }
}
