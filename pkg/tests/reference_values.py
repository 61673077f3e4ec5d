"""Published worked values used by several test modules."""

# multiset (as a string of one-letter elements) -> duplication degree, two decimals
DUP_TABLE = {
    "aaaaaa": 1.00,
    "aaabbb": 0.92,
    "aaaabb": 0.92,
    "aabbcc": 0.83,
    "aaabbc": 0.75,
    "aaabbbcd": 0.69,
    "aabbbcd": 0.64,
    "aabbcd": 0.58,
    "aaaabcde": 0.50,
    "aaabcd": 0.50,
    "aabc": 0.50,
    "aaacdef": 0.43,
    "aacdef": 0.33,
    "abcdef": 0.08,
}

SERIAL = 44228.3479166667
SERIAL_FORMAT = "MM/DD/YYYY HH:MM AM/PM"
SERIAL_DATETIME = "2021-02-01T08:21:00"
