from app.simulation.wave import EnergyTrace, WaveState, energy, run, run_comparison, step


__all__ = ["EnergyTrace", "WaveState", "energy", "run", "run_comparison", "step"]
