"""Length spectra of surfaces and surface amalgams built from octagons."""
