#include "secidx/stemmer.hpp"

#include <cstring>

// Porter stemming algorithm (M. F. Porter, 1980), following the widely
// used reference C implementation including its two marked departures
// (bli->ble, logi->log).

namespace secidx::text {
namespace {

class Stemmer {
public:
    explicit Stemmer(const std::string& word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_; // length 1 or 2: leave alone
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    std::string b_;
    int k_; // last index of the current word
    int j_ = 0; // last index of the stem once a suffix matched

    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // number of consonant-vowel sequences in [0, j]
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            i++;
        }
        i++;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                i++;
            }
            i++;
            n++;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                i++;
            }
            i++;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const {
        if (j < 1) return false;
        if (b_[static_cast<std::size_t>(j)] != b_[static_cast<std::size_t>(j - 1)]) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        if (len > k_ + 1) return false;
        if (std::memcmp(b_.data() + k_ - len + 1, s, static_cast<std::size_t>(len)) != 0)
            return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        b_.replace(static_cast<std::size_t>(j_ + 1), b_.size(), s);
        k_ = j_ + len;
    }

    void replace_if_stem(const char* s) {
        if (m() > 0) set_to(s);
    }

    // plurals and -ed / -ing
    void step1ab() {
        if (b_[static_cast<std::size_t>(k_)] == 's') {
            if (ends("sses"))
                k_ -= 2;
            else if (ends("ies"))
                set_to("i");
            else if (b_[static_cast<std::size_t>(k_ - 1)] != 's')
                k_--;
        }
        if (ends("eed")) {
            if (m() > 0) k_--;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at"))
                set_to("ate");
            else if (ends("bl"))
                set_to("ble");
            else if (ends("iz"))
                set_to("ize");
            else if (doublec(k_)) {
                k_--;
                char ch = b_[static_cast<std::size_t>(k_)];
                if (ch == 'l' || ch == 's' || ch == 'z') k_++;
            } else if (m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
    }

    // terminal y -> i when there is another vowel in the stem
    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    // double suffixes to single ones, e.g. -ization -> -ize
    void step2() {
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("ational")) { replace_if_stem("ate"); break; }
                if (ends("tional")) { replace_if_stem("tion"); break; }
                break;
            case 'c':
                if (ends("enci")) { replace_if_stem("ence"); break; }
                if (ends("anci")) { replace_if_stem("ance"); break; }
                break;
            case 'e':
                if (ends("izer")) { replace_if_stem("ize"); break; }
                break;
            case 'l':
                if (ends("bli")) { replace_if_stem("ble"); break; }
                if (ends("alli")) { replace_if_stem("al"); break; }
                if (ends("entli")) { replace_if_stem("ent"); break; }
                if (ends("eli")) { replace_if_stem("e"); break; }
                if (ends("ousli")) { replace_if_stem("ous"); break; }
                break;
            case 'o':
                if (ends("ization")) { replace_if_stem("ize"); break; }
                if (ends("ation")) { replace_if_stem("ate"); break; }
                if (ends("ator")) { replace_if_stem("ate"); break; }
                break;
            case 's':
                if (ends("alism")) { replace_if_stem("al"); break; }
                if (ends("iveness")) { replace_if_stem("ive"); break; }
                if (ends("fulness")) { replace_if_stem("ful"); break; }
                if (ends("ousness")) { replace_if_stem("ous"); break; }
                break;
            case 't':
                if (ends("aliti")) { replace_if_stem("al"); break; }
                if (ends("iviti")) { replace_if_stem("ive"); break; }
                if (ends("biliti")) { replace_if_stem("ble"); break; }
                break;
            case 'g':
                if (ends("logi")) { replace_if_stem("log"); break; }
                break;
        }
    }

    // -icate, -ful, -ness etc.
    void step3() {
        switch (b_[static_cast<std::size_t>(k_)]) {
            case 'e':
                if (ends("icate")) { replace_if_stem("ic"); break; }
                if (ends("ative")) { replace_if_stem(""); break; }
                if (ends("alize")) { replace_if_stem("al"); break; }
                break;
            case 'i':
                if (ends("iciti")) { replace_if_stem("ic"); break; }
                break;
            case 'l':
                if (ends("ical")) { replace_if_stem("ic"); break; }
                if (ends("ful")) { replace_if_stem(""); break; }
                break;
            case 's':
                if (ends("ness")) { replace_if_stem(""); break; }
                break;
        }
    }

    // -ant, -ence etc. in context <c>vcvc<v>
    void step4() {
        switch (b_[static_cast<std::size_t>(k_ - 1)]) {
            case 'a':
                if (ends("al")) break;
                return;
            case 'c':
                if (ends("ance")) break;
                if (ends("ence")) break;
                return;
            case 'e':
                if (ends("er")) break;
                return;
            case 'i':
                if (ends("ic")) break;
                return;
            case 'l':
                if (ends("able")) break;
                if (ends("ible")) break;
                return;
            case 'n':
                if (ends("ant")) break;
                if (ends("ement")) break;
                if (ends("ment")) break;
                if (ends("ent")) break;
                return;
            case 'o':
                if (ends("ion") && (b_[static_cast<std::size_t>(j_)] == 's' ||
                                    b_[static_cast<std::size_t>(j_)] == 't'))
                    break;
                if (ends("ou")) break;
                return;
            case 's':
                if (ends("ism")) break;
                return;
            case 't':
                if (ends("ate")) break;
                if (ends("iti")) break;
                return;
            case 'u':
                if (ends("ous")) break;
                return;
            case 'v':
                if (ends("ive")) break;
                return;
            case 'z':
                if (ends("ize")) break;
                return;
            default:
                return;
        }
        if (m() > 1) k_ = j_;
    }

    // final -e removal and -ll -> -l
    void step5() {
        j_ = k_;
        if (b_[static_cast<std::size_t>(k_)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) k_--;
        }
        if (b_[static_cast<std::size_t>(k_)] == 'l' && doublec(k_) && m() > 1) k_--;
    }
};

} // namespace

std::string stem(const std::string& term) {
    if (term.empty()) return term;
    return Stemmer(term).run();
}

} // namespace secidx::text
