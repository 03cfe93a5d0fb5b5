//! Playlist title normalization: lowercase, strip whitespace and a fixed set
//! of common non-alphanumeric symbols (including emoji codepoints).

/// Symbols removed in addition to whitespace.
const STRIPPED: &[char] = &[
    '!', '?', '.', ',', '\'', '"', '#', '$', '%', '&', '*', '(', ')', '-', '_', '+', '=', '/',
    '\\', ':', ';', '@', '~',
];

fn is_emoji(c: char) -> bool {
    matches!(u32::from(c),
        0x1F000..=0x1FFFF   // SMP pictographs, emoticons, transport, symbols
        | 0x2600..=0x27BF   // misc symbols and dingbats
        | 0x2B00..=0x2BFF   // arrows and stars (e.g. U+2B50)
        | 0xFE00..=0xFE0F   // variation selectors
        | 0x200D            // zero-width joiner
        | 0x20E3            // combining enclosing keycap
    )
}

/// Normalize a raw playlist title. Total function; the result may be empty.
pub fn normalize_title(raw: &str) -> String {
    raw.to_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace() && !STRIPPED.contains(c) && !is_emoji(*c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_case_space_and_symbols() {
        assert_eq!(normalize_title("  RoAd TriP!! "), "roadtrip");
        assert_eq!(normalize_title("WORK-OUT #1"), "workout1");
    }

    #[test]
    fn fixed_point() {
        assert_eq!(normalize_title("musical"), "musical");
    }

    #[test]
    fn may_become_empty() {
        assert_eq!(normalize_title(" !!! "), "");
        assert_eq!(normalize_title(""), "");
    }

    #[test]
    fn drops_emoji() {
        assert_eq!(normalize_title("summer \u{1F525}\u{1F3B5} jams"), "summerjams");
        assert_eq!(normalize_title("stars \u{2B50}\u{2764}\u{FE0F}"), "stars");
    }

    #[test]
    fn idempotent_on_samples() {
        for s in ["  RoAd TriP!! ", "WORK-OUT #1", "Ünïcode Mix", "\u{1F3B6} vibes"] {
            let once = normalize_title(s);
            assert_eq!(normalize_title(&once), once);
        }
    }
}
