"""Forms(limits) for the workbench

Both the JSON views and the management commands validate their input through
these forms, so a bad bound is reported the same way everywhere.
"""
from django.forms import CharField, ChoiceField, Form, IntegerField, Textarea, ValidationError

from . import conf
from .errors import WorkbenchError
from .lts import Dialect
from .network import Network

DIALECT_CHOICES = [(d.value, d.name) for d in Dialect]


class ExploreBoundsForm(Form):
    """Exploration bounds; blank fields take the `WORKBENCH` defaults.

    Attributes:
        depth (IntegerField): Maximum computation length, at least 1.
        unfold (IntegerField): Replication unfoldings per path, at least 0.
        states (IntegerField): Maximum number of distinct states, at least 1.
    """
    depth = IntegerField(min_value=1, required=False)
    unfold = IntegerField(min_value=0, required=False)
    states = IntegerField(min_value=1, required=False)

    def bounds(self):
        return conf.default_bounds(
            depth=self.cleaned_data.get('depth'),
            unfold=self.cleaned_data.get('unfold'),
            states=self.cleaned_data.get('states'),
        )


class NetworkForm(Form):
    """Network text in the `[id:] P || [id:] P` syntax, plus its dialect.

    The parsed network ends up in `cleaned_data['network']`.
    """
    text = CharField(max_length=20000, required=True, widget=Textarea(attrs={'rows': 6, 'cols': 80}))
    dialect = ChoiceField(choices=DIALECT_CHOICES, initial=Dialect.PI.value, required=False)

    def clean_dialect(self):
        return Dialect(self.cleaned_data.get('dialect') or Dialect.PI.value)

    def clean(self):
        cleaned = super().clean()
        text = cleaned.get('text')
        if text is None:
            return cleaned
        try:
            cleaned['network'] = Network.from_text(text)
        except WorkbenchError as err:
            raise ValidationError({'text': str(err)}) from err
        return cleaned


def form_errors(form) -> str:
    return "; ".join(f"{field}: {' '.join(errors)}" for field, errors in form.errors.items())
