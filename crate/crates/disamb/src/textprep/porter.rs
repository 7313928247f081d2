//! Porter suffix-stripping stemmer (the 1980 algorithm, all five steps).

/// Stem a lowercase ASCII alphabetic token. Tokens containing anything
/// other than lowercase ASCII letters, and tokens of length <= 2, pass
/// through unchanged.
pub fn porter_stem(token: &str) -> String {
    if token.len() <= 2 || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    let mut s = Stemmer {
        b: token.as_bytes().to_vec(),
        len: token.len(),
        j: 0,
    };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    String::from_utf8(s.b[..s.len].to_vec()).expect("stems are ascii")
}

struct Stemmer {
    b: Vec<u8>,
    /// Current word length; the live word is `b[..len]`.
    len: usize,
    /// Stem length set by the last successful `ends` call.
    j: usize,
}

impl Stemmer {
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// Number of consonant-vowel-consonant measures in `b[..limit]`.
    fn m(&self, limit: usize) -> usize {
        let mut i = 0;
        let mut n = 0;
        loop {
            if i >= limit {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i >= limit {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i >= limit {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.j).any(|i| !self.cons(i))
    }

    /// True when `b[i-1] == b[i]` and both are consonants.
    fn double_consonant(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.cons(i)
    }

    /// consonant - vowel - consonant ending at index `i`, where the final
    /// consonant is not w, x, or y.
    fn cvc(&self, i: isize) -> bool {
        if i < 2 {
            return false;
        }
        let i = i as usize;
        if !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    /// On a suffix match, record the stem length in `self.j`.
    fn ends(&mut self, suffix: &[u8]) -> bool {
        if suffix.len() > self.len {
            return false;
        }
        let start = self.len - suffix.len();
        if &self.b[start..self.len] == suffix {
            self.j = start;
            true
        } else {
            false
        }
    }

    fn set_to(&mut self, s: &[u8]) {
        self.b.truncate(self.j);
        self.b.extend_from_slice(s);
        self.len = self.j + s.len();
    }

    /// Replace the matched suffix when the stem has measure > 0.
    fn replace(&mut self, s: &[u8]) {
        if self.m(self.j) > 0 {
            self.set_to(s);
        }
    }

    /// Plurals and -ed / -ing.
    fn step1ab(&mut self) {
        if self.b[self.len - 1] == b's' {
            if self.ends(b"sses") {
                self.len -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.len >= 2 && self.b[self.len - 2] != b's' {
                self.len -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.m(self.j) > 0 {
                self.len -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.len = self.j;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_consonant(self.len - 1) {
                if !matches!(self.b[self.len - 1], b'l' | b's' | b'z') {
                    self.len -= 1;
                }
            } else if self.m(self.len) == 1 && self.cvc(self.len as isize - 1) {
                self.j = self.len;
                self.set_to(b"e");
            }
        }
    }

    /// Turn terminal y to i when there is a vowel in the stem.
    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            self.b[self.len - 1] = b'i';
        }
    }

    /// Map double suffixes to single ones (-ization -> -ize, ...).
    fn step2(&mut self) {
        if self.len < 2 {
            return;
        }
        match self.b[self.len - 2] {
            b'a' => {
                if self.ends(b"ational") {
                    self.replace(b"ate");
                } else if self.ends(b"tional") {
                    self.replace(b"tion");
                }
            }
            b'c' => {
                if self.ends(b"enci") {
                    self.replace(b"ence");
                } else if self.ends(b"anci") {
                    self.replace(b"ance");
                }
            }
            b'e' => {
                if self.ends(b"izer") {
                    self.replace(b"ize");
                }
            }
            b'l' => {
                if self.ends(b"abli") {
                    self.replace(b"able");
                } else if self.ends(b"alli") {
                    self.replace(b"al");
                } else if self.ends(b"entli") {
                    self.replace(b"ent");
                } else if self.ends(b"eli") {
                    self.replace(b"e");
                } else if self.ends(b"ousli") {
                    self.replace(b"ous");
                }
            }
            b'o' => {
                if self.ends(b"ization") {
                    self.replace(b"ize");
                } else if self.ends(b"ation") || self.ends(b"ator") {
                    self.replace(b"ate");
                }
            }
            b's' => {
                if self.ends(b"alism") {
                    self.replace(b"al");
                } else if self.ends(b"iveness") {
                    self.replace(b"ive");
                } else if self.ends(b"fulness") {
                    self.replace(b"ful");
                } else if self.ends(b"ousness") {
                    self.replace(b"ous");
                }
            }
            b't' => {
                if self.ends(b"aliti") {
                    self.replace(b"al");
                } else if self.ends(b"iviti") {
                    self.replace(b"ive");
                } else if self.ends(b"biliti") {
                    self.replace(b"ble");
                }
            }
            _ => {}
        }
    }

    /// -ic-, -full, -ness etc.
    fn step3(&mut self) {
        match self.b[self.len - 1] {
            b'e' => {
                if self.ends(b"icate") {
                    self.replace(b"ic");
                } else if self.ends(b"ative") {
                    self.replace(b"");
                } else if self.ends(b"alize") {
                    self.replace(b"al");
                }
            }
            b'i' => {
                if self.ends(b"iciti") {
                    self.replace(b"ic");
                }
            }
            b'l' => {
                if self.ends(b"ical") {
                    self.replace(b"ic");
                } else if self.ends(b"ful") {
                    self.replace(b"");
                }
            }
            b's' if self.ends(b"ness") => self.replace(b""),
            _ => {}
        }
    }

    /// Drop -ant, -ence etc. in context <c>vcvc<v>.
    fn step4(&mut self) {
        if self.len < 2 {
            return;
        }
        let matched = match self.b[self.len - 2] {
            b'a' => self.ends(b"al"),
            b'c' => self.ends(b"ance") || self.ends(b"ence"),
            b'e' => self.ends(b"er"),
            b'i' => self.ends(b"ic"),
            b'l' => self.ends(b"able") || self.ends(b"ible"),
            b'n' => {
                self.ends(b"ant")
                    || self.ends(b"ement")
                    || self.ends(b"ment")
                    || self.ends(b"ent")
            }
            b'o' => {
                (self.ends(b"ion") && self.j >= 1 && matches!(self.b[self.j - 1], b's' | b't'))
                    || self.ends(b"ou")
            }
            b's' => self.ends(b"ism"),
            b't' => self.ends(b"ate") || self.ends(b"iti"),
            b'u' => self.ends(b"ous"),
            b'v' => self.ends(b"ive"),
            b'z' => self.ends(b"ize"),
            _ => false,
        };
        if matched && self.m(self.j) > 1 {
            self.len = self.j;
        }
    }

    /// Remove a final -e and reduce -ll in long stems.
    fn step5(&mut self) {
        if self.b[self.len - 1] == b'e' {
            let a = self.m(self.len);
            if a > 1 || (a == 1 && !self.cvc(self.len as isize - 2)) {
                self.len -= 1;
            }
        }
        if self.b[self.len - 1] == b'l'
            && self.double_consonant(self.len - 1)
            && self.m(self.len) > 1
        {
            self.len -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_and_non_alphabetic_tokens_pass_through() {
        assert_eq!(porter_stem("a"), "a");
        assert_eq!(porter_stem("by"), "by");
        assert_eq!(porter_stem("kim,"), "kim,");
        assert_eq!(porter_stem("x509"), "x509");
        assert_eq!(porter_stem(""), "");
    }

    #[test]
    fn step1a_plurals() {
        assert_eq!(porter_stem("caresses"), "caress");
        assert_eq!(porter_stem("ponies"), "poni");
        assert_eq!(porter_stem("ties"), "ti");
        assert_eq!(porter_stem("caress"), "caress");
        assert_eq!(porter_stem("cats"), "cat");
    }

    #[test]
    fn step1b_ed_and_ing() {
        assert_eq!(porter_stem("feed"), "feed");
        assert_eq!(porter_stem("agreed"), "agre");
        assert_eq!(porter_stem("plastered"), "plaster");
        assert_eq!(porter_stem("bled"), "bled");
        assert_eq!(porter_stem("motoring"), "motor");
        assert_eq!(porter_stem("sing"), "sing");
        assert_eq!(porter_stem("conflated"), "conflat");
        assert_eq!(porter_stem("troubled"), "troubl");
        assert_eq!(porter_stem("sized"), "size");
        assert_eq!(porter_stem("hopping"), "hop");
        assert_eq!(porter_stem("tanned"), "tan");
        assert_eq!(porter_stem("falling"), "fall");
        assert_eq!(porter_stem("hissing"), "hiss");
        assert_eq!(porter_stem("fizzed"), "fizz");
        assert_eq!(porter_stem("failing"), "fail");
        assert_eq!(porter_stem("filing"), "file");
    }

    #[test]
    fn step1c_y_to_i() {
        assert_eq!(porter_stem("happy"), "happi");
        assert_eq!(porter_stem("sky"), "sky");
    }

    #[test]
    fn step2_double_suffixes() {
        assert_eq!(porter_stem("relational"), "relat");
        assert_eq!(porter_stem("conditional"), "condit");
        assert_eq!(porter_stem("rational"), "ration");
        assert_eq!(porter_stem("valenci"), "valenc");
        assert_eq!(porter_stem("hesitanci"), "hesit");
        assert_eq!(porter_stem("digitizer"), "digit");
        assert_eq!(porter_stem("operator"), "oper");
        assert_eq!(porter_stem("feudalism"), "feudal");
        assert_eq!(porter_stem("decisiveness"), "decis");
        assert_eq!(porter_stem("hopefulness"), "hope");
        assert_eq!(porter_stem("callousness"), "callous");
        assert_eq!(porter_stem("formaliti"), "formal");
        assert_eq!(porter_stem("sensitiviti"), "sensit");
        assert_eq!(porter_stem("sensibiliti"), "sensibl");
    }

    #[test]
    fn step3_endings() {
        assert_eq!(porter_stem("triplicate"), "triplic");
        assert_eq!(porter_stem("formative"), "form");
        assert_eq!(porter_stem("formalize"), "formal");
        assert_eq!(porter_stem("electriciti"), "electr");
        assert_eq!(porter_stem("electrical"), "electr");
        assert_eq!(porter_stem("hopeful"), "hope");
        assert_eq!(porter_stem("goodness"), "good");
    }

    #[test]
    fn step4_context_stripping() {
        assert_eq!(porter_stem("revival"), "reviv");
        assert_eq!(porter_stem("allowance"), "allow");
        assert_eq!(porter_stem("inference"), "infer");
        assert_eq!(porter_stem("airliner"), "airlin");
        assert_eq!(porter_stem("gyroscopic"), "gyroscop");
        assert_eq!(porter_stem("adjustable"), "adjust");
        assert_eq!(porter_stem("defensible"), "defens");
        assert_eq!(porter_stem("irritant"), "irrit");
        assert_eq!(porter_stem("replacement"), "replac");
        assert_eq!(porter_stem("adjustment"), "adjust");
        assert_eq!(porter_stem("dependent"), "depend");
        assert_eq!(porter_stem("adoption"), "adopt");
        assert_eq!(porter_stem("homologou"), "homolog");
        assert_eq!(porter_stem("communism"), "commun");
        assert_eq!(porter_stem("activate"), "activ");
        assert_eq!(porter_stem("angulariti"), "angular");
        assert_eq!(porter_stem("homologous"), "homolog");
        assert_eq!(porter_stem("effective"), "effect");
        assert_eq!(porter_stem("bowdlerize"), "bowdler");
    }

    #[test]
    fn step5_final_e_and_double_l() {
        assert_eq!(porter_stem("probate"), "probat");
        assert_eq!(porter_stem("rate"), "rate");
        assert_eq!(porter_stem("cease"), "ceas");
        assert_eq!(porter_stem("controll"), "control");
        assert_eq!(porter_stem("roll"), "roll");
    }

    #[test]
    fn title_vocabulary() {
        assert_eq!(porter_stem("supervised"), "supervis");
        assert_eq!(porter_stem("learning"), "learn");
        assert_eq!(porter_stem("approaches"), "approach");
        assert_eq!(porter_stem("disambiguation"), "disambigu");
        assert_eq!(porter_stem("citations"), "citat");
    }
}
