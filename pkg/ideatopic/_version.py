"""ideatopic - Topic mining for brainstorming transcripts."""

__version__ = "0.1.0"
