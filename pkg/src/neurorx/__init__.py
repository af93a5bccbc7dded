"""Link-level simulator of a two-neuron spiking BPSK receiver."""

__version__ = "0.1.0"
