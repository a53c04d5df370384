# admin.py
# Registers the run-history model with the Django admin site.

from django.contrib import admin

from .models import PipelineRun
from .utils import dot_if_none


# Custom ModelAdmin that displays periods instead of None
class DotForNoneModelAdmin(admin.ModelAdmin):
    """
    A ModelAdmin that displays periods instead of None values in all table views.
    """

    def _get_list_display_custom(self, model, field_names):
        """Generate dynamic methods for each field to display dot if None"""
        display_methods = []

        for field_name in field_names:
            def make_display_method(field):
                def display_method(obj):
                    return dot_if_none(getattr(obj, field, None))
                display_method.__name__ = f"display_{field}"
                display_method.short_description = field.replace('_', ' ').title()
                display_method.admin_order_field = field
                help_text = model._meta.get_field(field).help_text
                if help_text:
                    display_method.help_text = help_text
                return display_method

            method_name = f"display_{field_name}"
            setattr(self, method_name, make_display_method(field_name))
            display_methods.append(method_name)

        return display_methods


@admin.register(PipelineRun)
class PipelineRunAdmin(DotForNoneModelAdmin):
    search_fields = ['distance_kind', 'input_model', 'm_path', 'n_path']
    list_filter = ['distance_kind', 'input_model', 'evolution_mode', 'qpe_bits']
    readonly_fields = ['created', 'report']
    list_fields = [
        'created', 'distance_kind', 'input_model', 'evolution_mode', 'qpe_bits', 'shots', 'seed',
        'n', 'k', 'classical_value', 'quantum_estimate', 'abs_error', 'epsilon_p', 'leaked_mass',
    ]

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.list_display = self._get_list_display_custom(PipelineRun, self.list_fields)

    def get_list_display_links(self, request, list_display):
        """Make the creation time the clickable link field"""
        return ['display_created']
