"""
Romanizing related scripts into one alphabet
=============================================

Telugu and Kannada share most of their vocabulary but almost none of
their code points.  Romanization maps both onto the same Latin strings,
and restoring brings the native script back exactly.
"""

from unmtlab.similarity import overlap, profile
from unmtlab.translit import builtin_scheme, restore, romanize

telugu = builtin_scheme("telugu")
kannada = builtin_scheme("kannada")

te = "తెలుగు భాష 2024 లో"
kn = "ತೆಲುಗು ಭಾಷೆ 2024 ಲ್ಲಿ"
print(romanize(te, telugu))
print(romanize(kn, kannada))

# Round trip: pure-script text comes back unchanged, digits stay Latin.
assert restore(romanize(kn, kannada), kannada) == kn

# Native digits fold to ASCII, so they read the same in every script.
print(romanize("೧೯೪೭", kannada))

# Character trigram overlap is zero across scripts and jumps once both
# sides are written in Latin.
raw = overlap(profile([te.split()]), profile([kn.split()]))
rom = overlap(profile([romanize(te, telugu).split()]), profile([romanize(kn, kannada).split()]))
print(f"overlap native {raw:.2f}  romanized {rom:.2f}")

# Latin words mixed into native text cannot be told apart from
# romanized words, so restoration turns them into native script too.
mixed = "ಇದು www.site.com ನೋಡಿ."
print(restore(romanize(mixed, kannada), kannada))
