# Unit tests package